//! Decay of unit-arc measures towards the boundary.
//!
//! Both profiles are estimators of a supremum over a constrained family of
//! unit arcs, reported as the larger of two lower bounds:
//!
//! * a chain estimator: for every pair of leaves within distance 1 (and every
//!   single leaf), arcs joining a grid of points on one leaf to their
//!   projections on the other, extended to unit length past whichever end
//!   lies deeper, so the extension only helps the constraint;
//! * the randomized [`ArcSampler`] with a wide leaf spread.
//!
//! Distance to a point is convex along geodesics, so the Euclidean depth of
//! an arc and its distance from `i` are attained at an endpoint or at the
//! foot of a perpendicular; no interior search is needed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sampling::ArcSampler;
use super::{geodesic_distance, transverse_measure, FiniteMeasuredLamination, CLOSED_TOL};
use crate::hyperbolic::{hyp_distance, GeodesicArc, HPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    /// Depth `δ` for depth profiles, exhaustion radius `R` otherwise.
    pub scale: f64,
    pub sup_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub entries: Vec<ProfileEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Constraint {
    /// Euclidean distance of the disk image to the unit circle.
    Depth,
    /// Hyperbolic distance from `i`.
    Exhaustion,
}

impl Constraint {
    /// The quantity the constraint bounds, for a given arc.
    fn statistic(self, arc: &GeodesicArc) -> f64 {
        match self {
            Constraint::Depth => arc.start.boundary_depth().min(arc.end.boundary_depth()),
            Constraint::Exhaustion => arc.distance_to_point(&HPoint::i()),
        }
    }

    /// Whether `end` is the endpoint to push further out.
    fn extend_at_end(self, arc: &GeodesicArc) -> bool {
        match self {
            Constraint::Depth => arc.end.boundary_depth() <= arc.start.boundary_depth(),
            Constraint::Exhaustion => {
                let i = HPoint::i();
                hyp_distance(&arc.end, &i) >= hyp_distance(&arc.start, &i)
            }
        }
    }

    fn admits(self, statistic: f64, scale: f64) -> bool {
        match self {
            Constraint::Depth => statistic <= scale,
            Constraint::Exhaustion => statistic > scale,
        }
    }
}

const GRID_HALF_WIDTH: f64 = 20.0;
const GRID_STEP: f64 = 0.5;

fn chain_arcs(mu: &FiniteMeasuredLamination, constraint: Constraint) -> Vec<GeodesicArc> {
    let steps = (2.0 * GRID_HALF_WIDTH / GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| -GRID_HALF_WIDTH + k as f64 * GRID_STEP).collect();
    let mut arcs = Vec::new();
    let leaves = mu.leaves();
    for (i, li) in leaves.iter().enumerate() {
        let frame = li.geodesic.frame();
        for &s in &grid {
            let a = HPoint { x: 0.0, y: s.exp() };
            for dir in [0.0, PI] {
                arcs.push(GeodesicArc::new(frame.apply(&a), frame.apply(&a.travel(dir, 1.0))));
            }
        }
        for (j, lj) in leaves.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = geodesic_distance(&li.geodesic, &lj.geodesic).expect("disjoint leaves");
            if d > 1.0 + CLOSED_TOL {
                continue;
            }
            for &s in &grid {
                let a = li.geodesic.point_at(s);
                let b = lj.geodesic.project(&a);
                let seg = GeodesicArc::new(a, b);
                let len = seg.length();
                if len > 1.0 + CLOSED_TOL {
                    continue;
                }
                let seg = if constraint.extend_at_end(&seg) { seg } else { seg.reversed() };
                arcs.push(seg.extend_end(1.0 - len));
            }
        }
    }
    arcs
}

fn profile(
    mu: &FiniteMeasuredLamination,
    scales: &[f64],
    constraint: Constraint,
    sampler: &ArcSampler,
) -> DecayProfile {
    let mut sorted: Vec<f64> = scales.to_vec();
    match constraint {
        Constraint::Depth => sorted.sort_by(|a, b| b.total_cmp(a)),
        Constraint::Exhaustion => sorted.sort_by(|a, b| a.total_cmp(b)),
    }
    sorted.dedup();
    if mu.is_empty() {
        return DecayProfile {
            entries: sorted.into_iter().map(|scale| ProfileEntry { scale, sup_measure: 0.0 }).collect(),
        };
    }
    let mut arcs = chain_arcs(mu, constraint);
    arcs.extend(sampler.sample(mu));
    let evaluated: Vec<(f64, f64)> = arcs
        .iter()
        .map(|arc| (constraint.statistic(arc), transverse_measure(mu, arc)))
        .collect();
    let entries = sorted
        .into_iter()
        .map(|scale| {
            let sup_measure = evaluated
                .iter()
                .filter(|(stat, _)| constraint.admits(*stat, scale))
                .map(|&(_, m)| m)
                .fold(0.0, f64::max);
            ProfileEntry { scale, sup_measure }
        })
        .collect();
    DecayProfile { entries }
}

fn profile_sampler(seed: u64) -> ArcSampler {
    ArcSampler { count: 10_000, seed, leaf_spread: GRID_HALF_WIDTH }
}

/// For each depth `δ`, estimated supremum of the measure of unit arcs whose
/// disk image comes within Euclidean distance `δ` of the unit circle.
/// Entries are ordered by decreasing depth.
pub fn depth_profile(mu: &FiniteMeasuredLamination, depths: &[f64]) -> DecayProfile {
    depth_profile_with(mu, depths, &profile_sampler(0))
}

pub fn depth_profile_with(mu: &FiniteMeasuredLamination, depths: &[f64], sampler: &ArcSampler) -> DecayProfile {
    profile(mu, depths, Constraint::Depth, sampler)
}

/// For each radius `R`, estimated supremum of the measure of unit arcs
/// disjoint from the closed hyperbolic disk of radius `R` about `i`.
/// Entries are ordered by increasing radius.
pub fn exhaustion_profile(mu: &FiniteMeasuredLamination, radii: &[f64]) -> DecayProfile {
    exhaustion_profile_with(mu, radii, &profile_sampler(0))
}

pub fn exhaustion_profile_with(mu: &FiniteMeasuredLamination, radii: &[f64], sampler: &ArcSampler) -> DecayProfile {
    profile(mu, radii, Constraint::Exhaustion, sampler)
}

/// Measure carried by the Euclidean circle `|w| = 1 − 1/n` of the disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMass {
    pub n: u32,
    /// Hyperbolic length `4π(n−1)/(2−1/n)`.
    pub length: f64,
    /// Largest measure of a subarc of hyperbolic length 1.
    pub sup_unit_measure: f64,
    /// `sup_unit_measure · ⌈length⌉`, an upper bound for the total mass.
    pub bound: f64,
    pub total_mass: f64,
}

/// Leaf crossings with the circle `|w| = ρ`, as polar angles.
fn circle_crossings(mu: &FiniteMeasuredLamination, rho: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for leaf in mu.leaves() {
        let (p, q) = leaf.geodesic.endpoints();
        let (p, q) = (p.to_disk(), q.to_disk());
        let sum = p + q;
        if sum.norm() < 1e-12 {
            out.push((p.arg(), leaf.weight));
            out.push((q.arg(), leaf.weight));
            continue;
        }
        // orthogonal circle through p and q
        let center = sum / (1.0 + (p * q.conj()).re);
        let c = (1.0 + rho * rho) / (2.0 * rho * center.norm());
        if c > 1.0 {
            continue;
        }
        let half = c.acos();
        let base = center.arg();
        if half == 0.0 {
            out.push((base, leaf.weight));
        } else {
            out.push((base - half, leaf.weight));
            out.push((base + half, leaf.weight));
        }
    }
    out
}

/// Mass bound for the circle of Euclidean radius `1 − 1/n`; the unit-subarc
/// supremum is exact, obtained by sliding a window of the circle's unit
/// angular width across the sorted crossings.
pub fn circle_mass_bound(mu: &FiniteMeasuredLamination, n: u32) -> crate::Result<CircleMass> {
    if n < 2 {
        return Err(crate::Error::InvalidParameter(format!("circle index n must be at least 2, got {n}")));
    }
    let nf = n as f64;
    let length = 4.0 * PI * (nf - 1.0) / (2.0 - 1.0 / nf);
    let rho = 1.0 - 1.0 / nf;
    let window = (1.0 - rho * rho) / (2.0 * rho);
    let mut crossings: Vec<(f64, f64)> = circle_crossings(mu, rho)
        .into_iter()
        .map(|(a, w)| (a.rem_euclid(2.0 * PI), w))
        .collect();
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total_mass: f64 = crossings.iter().map(|c| c.1).sum();
    let m = crossings.len();
    let mut sup = 0.0f64;
    if window >= 2.0 * PI {
        sup = total_mass;
    } else {
        for k in 0..m {
            let start = crossings[k].0;
            let mut acc = 0.0;
            for step in 0..m {
                let (angle, w) = crossings[(k + step) % m];
                let wrapped = if k + step >= m { angle + 2.0 * PI } else { angle };
                if wrapped - start <= window + 1e-15 {
                    acc += w;
                } else {
                    break;
                }
            }
            sup = sup.max(acc);
        }
    }
    Ok(CircleMass { n, length, sup_unit_measure: sup, bound: sup * length.ceil(), total_mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::Geodesic;

    fn single(p: f64, q: f64, w: f64) -> FiniteMeasuredLamination {
        FiniteMeasuredLamination::new(vec![(Geodesic::from_reals(p, q).unwrap(), w)]).unwrap()
    }

    #[test]
    fn empty_profiles_vanish() {
        let e = FiniteMeasuredLamination::empty();
        assert!(depth_profile(&e, &[0.1, 0.01]).entries.iter().all(|x| x.sup_measure == 0.0));
        assert!(exhaustion_profile(&e, &[1.0, 2.0]).entries.iter().all(|x| x.sup_measure == 0.0));
    }

    #[test]
    fn single_leaf_reaches_every_depth() {
        // a complete geodesic ends on the circle, so unit arcs crossing it
        // exist at every positive depth
        let mu = single(-1.0, 1.0, 0.6);
        let prof = depth_profile(&mu, &[0.5, 0.1, 1e-3, 1e-6]);
        assert!(prof.entries.iter().all(|e| e.sup_measure == 0.6));
        assert!(prof.entries.windows(2).all(|w| w[0].scale > w[1].scale));
    }

    #[test]
    fn single_leaf_escapes_every_disk() {
        let mu = single(-1.0, 1.0, 0.6);
        let prof = exhaustion_profile(&mu, &[0.5, 2.0, 6.0]);
        assert!(prof.entries.iter().all(|e| e.sup_measure == 0.6));
    }

    #[test]
    fn circle_length_closed_form() {
        let c = circle_mass_bound(&FiniteMeasuredLamination::empty(), 2).unwrap();
        assert!((c.length - 8.0 * PI / 3.0).abs() < 1e-14);
        assert!((c.length - 8.3776).abs() < 1e-4);
        assert_eq!(c.bound, 0.0);
        assert!(circle_mass_bound(&FiniteMeasuredLamination::empty(), 1).is_err());
    }

    #[test]
    fn diameter_crosses_every_circle_twice() {
        // (0, ∞) is the diameter from −1 to 1 in the disk
        let mu = single(0.0, f64::INFINITY, 0.3);
        for n in [2, 5, 40] {
            let c = circle_mass_bound(&mu, n).unwrap();
            assert!((c.total_mass - 0.6).abs() < 1e-15);
            assert!((c.sup_unit_measure - 0.3).abs() < 1e-15);
        }
    }
}
