//! Finite measured laminations of the hyperbolic plane.
//!
//! A [`FiniteMeasuredLamination`] is a finite set of pairwise disjoint
//! geodesics carrying positive atomic weights. The transverse measure of a
//! closed arc is the total weight of the leaves it meets.

mod io;
mod profile;
mod sampling;

pub use io::{parse_lamination, read_lamination, write_lamination, format_lamination, Model};
pub use profile::{circle_mass_bound, depth_profile, exhaustion_profile, CircleMass, DecayProfile, ProfileEntry};
pub use sampling::{random_unit_arcs, sampled_norm, ArcSampler};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{cross, Geodesic, GeodesicArc, MoebiusMap, Side, GEOM_TOL};

/// Slack on the closed inequalities of the measure and chain tests.
const CLOSED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Leaf {
    pub geodesic: Geodesic,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FiniteMeasuredLamination {
    leaves: Vec<Leaf>,
}

impl FiniteMeasuredLamination {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates weights and disjointness (errors carry input indices), then
    /// merges coincident geodesics by adding their weights.
    pub fn new(leaves: Vec<(Geodesic, f64)>) -> Result<Self> {
        for (index, (_, weight)) in leaves.iter().enumerate() {
            if !(weight.is_finite() && *weight > 0.0) {
                return Err(Error::BadWeight { index, weight: *weight });
            }
        }
        for i in 0..leaves.len() {
            for j in (i + 1)..leaves.len() {
                if leaves[i].0.crosses(&leaves[j].0) {
                    return Err(Error::CrossingLeaves { first: i, second: j });
                }
            }
        }
        let mut merged: Vec<Leaf> = Vec::with_capacity(leaves.len());
        for (geodesic, weight) in leaves {
            match merged.iter_mut().find(|l| l.geodesic.approx_eq(&geodesic, GEOM_TOL)) {
                Some(existing) => existing.weight += weight,
                None => merged.push(Leaf { geodesic, weight }),
            }
        }
        Ok(Self { leaves: merged })
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.leaves.iter().map(|l| l.weight).sum()
    }

    /// Same leaves (up to endpoint tolerance) with weights within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self.leaves.iter().all(|l| {
                other.leaves.iter().any(|m| {
                    m.geodesic.approx_eq(&l.geodesic, 1e-9) && (m.weight - l.weight).abs() <= tol
                })
            })
    }

    pub fn transverse_measure(&self, arc: &GeodesicArc) -> f64 {
        transverse_measure(self, arc)
    }

    pub fn thurston_norm(&self) -> f64 {
        thurston_norm(self)
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        scale(self, s)
    }

    pub fn pushforward(&self, g: &MoebiusMap) -> Self {
        pushforward(self, g)
    }
}

/// Total weight of the leaves meeting the closed arc.
///
/// The arc is moved onto `[i, i·e^L]` on the imaginary axis. A leaf with
/// endpoints `p < 0 < q` then crosses the axis at height `√(−pq)`; a leaf
/// sharing exactly one endpoint with the axis never meets it; the axis
/// itself contains the arc and counts.
pub fn transverse_measure(mu: &FiniteMeasuredLamination, arc: &GeodesicArc) -> f64 {
    if mu.is_empty() {
        return 0.0;
    }
    let len = arc.length();
    let n = arc.normalizer();
    let zero = crate::hyperbolic::BoundaryPoint::from_real(0.0);
    let inf = crate::hyperbolic::BoundaryPoint::infinity();
    let mut total = 0.0;
    for leaf in &mu.leaves {
        let (p, q) = n.apply_geodesic(&leaf.geodesic).endpoints();
        let at_zero = p.approx_eq(&zero, GEOM_TOL) || q.approx_eq(&zero, GEOM_TOL);
        let at_inf = p.approx_eq(&inf, GEOM_TOL) || q.approx_eq(&inf, GEOM_TOL);
        let meets = match (at_zero, at_inf) {
            (true, true) => true,
            (true, false) | (false, true) => false,
            (false, false) => {
                // y_p y_q (p − 0)(q − 0) sign via the projective pairs
                let (px, py) = p.pair();
                let (qx, qy) = q.pair();
                let prod = (px / py) * (qx / qy);
                if prod >= 0.0 {
                    false
                } else {
                    let log_height = 0.5 * (-prod).ln();
                    log_height >= -CLOSED_TOL && log_height <= len + CLOSED_TOL
                }
            }
        };
        if meets {
            total += leaf.weight;
        }
    }
    total
}

/// Length of the common perpendicular of two disjoint geodesics; zero for
/// equal or asymptotic pairs.
pub fn geodesic_distance(g1: &Geodesic, g2: &Geodesic) -> Result<f64> {
    if g1.approx_eq(g2, GEOM_TOL) || g1.shares_endpoint(g2, GEOM_TOL) {
        return Ok(0.0);
    }
    if g1.crosses(g2) {
        return Err(Error::CrossingGeodesics);
    }
    let (a, b) = g1.endpoints();
    let (c, d) = g2.endpoints();
    let k = (cross(&c, &a) * cross(&d, &b)) / (cross(&d, &a) * cross(&c, &b));
    let k = k.abs();
    let k = if k > 1.0 { 1.0 / k } else { k };
    Ok(2.0 * k.sqrt().atanh())
}

fn side_of_leaf(h: &Geodesic, g: &Geodesic) -> Side {
    let (p, q) = g.endpoints();
    match h.side_of_boundary(&p) {
        Side::On => h.side_of_boundary(&q),
        s => s,
    }
}

/// True when `h` strictly separates the disjoint geodesics `g1` and `g2`.
pub fn separates(h: &Geodesic, g1: &Geodesic, g2: &Geodesic) -> bool {
    if h.approx_eq(g1, GEOM_TOL) || h.approx_eq(g2, GEOM_TOL) {
        return false;
    }
    let s1 = side_of_leaf(h, g1);
    let s2 = side_of_leaf(h, g2);
    s1 != Side::On && s2 != Side::On && s1 != s2
}

/// Leaves of a chain: the two extremes plus every leaf separating them.
pub fn chain_between(mu: &FiniteMeasuredLamination, i: usize, j: usize) -> Vec<usize> {
    let (gi, gj) = (&mu.leaves[i].geodesic, &mu.leaves[j].geodesic);
    let mut members = vec![i];
    if j != i {
        members.push(j);
        members.extend(
            (0..mu.len()).filter(|&k| k != i && k != j && separates(&mu.leaves[k].geodesic, gi, gj)),
        );
    }
    members
}

/// Exact supremum of the transverse measure over closed unit arcs.
///
/// An arc meets exactly the leaves separating its endpoints (plus those
/// through them), so the leaves met by one arc form a chain. A chain with
/// extreme leaves `g, h` fits in a unit arc iff `d(g, h) ≤ 1`, the common
/// perpendicular being the shortest arc meeting both.
pub fn thurston_norm(mu: &FiniteMeasuredLamination) -> f64 {
    thurston_norm_chain(mu).0
}

/// The norm together with the leaf indices of a maximizing chain.
pub fn thurston_norm_chain(mu: &FiniteMeasuredLamination) -> (f64, Vec<usize>) {
    let mut best = (0.0, Vec::new());
    for i in 0..mu.len() {
        for j in i..mu.len() {
            if j != i {
                let d = geodesic_distance(&mu.leaves[i].geodesic, &mu.leaves[j].geodesic)
                    .expect("leaves of a lamination are disjoint");
                if d > 1.0 + CLOSED_TOL {
                    continue;
                }
            }
            let chain = chain_between(mu, i, j);
            let value: f64 = chain.iter().map(|&k| mu.leaves[k].weight).sum();
            if value > best.0 {
                best = (value, chain);
            }
        }
    }
    best
}

pub fn scale(mu: &FiniteMeasuredLamination, s: f64) -> Result<FiniteMeasuredLamination> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::NegativeScale(s));
    }
    if s == 0.0 {
        return Ok(FiniteMeasuredLamination::empty());
    }
    Ok(FiniteMeasuredLamination {
        leaves: mu.leaves.iter().map(|l| Leaf { geodesic: l.geodesic, weight: l.weight * s }).collect(),
    })
}

pub fn pushforward(mu: &FiniteMeasuredLamination, g: &MoebiusMap) -> FiniteMeasuredLamination {
    FiniteMeasuredLamination {
        leaves: mu
            .leaves
            .iter()
            .map(|l| Leaf { geodesic: g.apply_geodesic(&l.geodesic), weight: l.weight })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::HPoint;

    fn lam(leaves: &[(f64, f64, f64)]) -> FiniteMeasuredLamination {
        FiniteMeasuredLamination::new(
            leaves.iter().map(|&(p, q, w)| (Geodesic::from_reals(p, q).unwrap(), w)).collect(),
        )
        .unwrap()
    }

    fn vertical(lo: f64, hi: f64) -> GeodesicArc {
        GeodesicArc::new(HPoint::new(0.0, lo).unwrap(), HPoint::new(0.0, hi).unwrap())
    }

    #[test]
    fn measure_examples() {
        let mu = lam(&[(-1.0, 1.0, 0.5), (-2.0, 2.0, 0.3)]);
        assert!((transverse_measure(&mu, &vertical(0.5, 3.0)) - 0.8).abs() < 1e-15);
        assert_eq!(transverse_measure(&mu, &vertical(1.5, 1.9)), 0.0);
        assert_eq!(transverse_measure(&FiniteMeasuredLamination::empty(), &vertical(0.5, 3.0)), 0.0);
    }

    #[test]
    fn closed_arc_endpoints_count() {
        let mu = lam(&[(-1.0, 1.0, 0.5)]);
        assert_eq!(transverse_measure(&mu, &vertical(1.0, 2.0)), 0.5);
        assert_eq!(transverse_measure(&mu, &vertical(0.5, 1.0)), 0.5);
    }

    #[test]
    fn arc_inside_leaf_counts_and_asymptotic_leaf_does_not() {
        let mu = lam(&[(0.0, f64::INFINITY, 0.4)]);
        assert_eq!(transverse_measure(&mu, &vertical(1.0, 2.0)), 0.4);
        let mu = lam(&[(0.0, 3.0, 0.4)]);
        assert_eq!(transverse_measure(&mu, &vertical(1.0, 2.0)), 0.0);
    }

    #[test]
    fn norm_examples() {
        assert!((thurston_norm(&lam(&[(-1.0, 1.0, 0.7)])) - 0.7).abs() < 1e-15);
        assert!((thurston_norm(&lam(&[(-1.0, 1.0, 1.0), (-2.0, 2.0, 1.0)])) - 2.0).abs() < 1e-15);
        assert!((thurston_norm(&lam(&[(-1.0, 1.0, 1.0), (-8.0, 8.0, 1.0)])) - 1.0).abs() < 1e-15);
        assert_eq!(thurston_norm(&FiniteMeasuredLamination::empty()), 0.0);
    }

    #[test]
    fn norm_counts_separating_leaves_between_extremes() {
        // (−1.5, 1.5) sits between the extremes and is crossed by their perpendicular
        let mu = lam(&[(-1.0, 1.0, 0.2), (-1.5, 1.5, 0.3), (-2.0, 2.0, 0.4)]);
        let (v, chain) = thurston_norm_chain(&mu);
        assert!((v - 0.9).abs() < 1e-15);
        assert_eq!(chain.len(), 3);
    }

    #[test]
    fn distance_examples() {
        let a = Geodesic::from_reals(-1.0, 1.0).unwrap();
        let b = Geodesic::from_reals(-2.0, 2.0).unwrap();
        assert!((geodesic_distance(&a, &b).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert_eq!(geodesic_distance(&a, &a).unwrap(), 0.0);
        let c = Geodesic::from_reals(0.0, 5.0).unwrap();
        assert!(matches!(geodesic_distance(&a, &c), Err(Error::CrossingGeodesics)));
        let d = Geodesic::from_reals(1.0, 4.0).unwrap();
        assert_eq!(geodesic_distance(&a, &d).unwrap(), 0.0);
    }

    #[test]
    fn scale_examples() {
        let mu = lam(&[(-1.0, 1.0, 1.0), (-2.0, 2.0, 0.5)]);
        assert!(scale(&mu, 1.0).unwrap().approx_eq(&mu, 0.0));
        assert!(scale(&mu, 0.0).unwrap().is_empty());
        assert!(matches!(scale(&mu, -0.1), Err(Error::NegativeScale(_))));
        let s = 2.5;
        assert!((thurston_norm(&scale(&mu, s).unwrap()) - s * thurston_norm(&mu)).abs() < 1e-14);
    }

    #[test]
    fn pushforward_examples() {
        let mu = lam(&[(0.0, f64::INFINITY, 0.9)]);
        assert!(pushforward(&mu, &MoebiusMap::identity()).approx_eq(&mu, 0.0));
        let moved = pushforward(&mu, &MoebiusMap::translation(1.0));
        assert!(moved.approx_eq(&lam(&[(1.0, f64::INFINITY, 0.9)]), 0.0));
    }

    #[test]
    fn construction_validates_and_merges() {
        let g = Geodesic::from_reals(-1.0, 1.0).unwrap();
        let mu = FiniteMeasuredLamination::new(vec![(g, 0.25), (g, 0.5)]).unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.leaves()[0].weight, 0.75);
        let h = Geodesic::from_reals(0.0, 3.0).unwrap();
        assert!(matches!(
            FiniteMeasuredLamination::new(vec![(g, 1.0), (h, 1.0)]),
            Err(Error::CrossingLeaves { first: 0, second: 1 })
        ));
        assert!(matches!(
            FiniteMeasuredLamination::new(vec![(g, 0.0)]),
            Err(Error::BadWeight { index: 0, .. })
        ));
    }
}
