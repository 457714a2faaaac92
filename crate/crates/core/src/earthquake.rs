//! Finite left earthquakes.
//!
//! The complement of a finite lamination has one more component than there
//! are leaves. Rooting the dual tree at the base component (the one
//! containing the base point), every other component sits just beyond a
//! unique leaf, its *parent leaf*, so components are indexed by leaves.
//!
//! The map on the component beyond leaf `g` is `E_parent ∘ T_g`, where
//! `T_g` translates by `weight(g)` along `g`. Products are therefore
//! accumulated from the base outward. For a left earthquake `T_g` runs from
//! its repelling to its attracting fixed point along the counterclockwise arc
//! on the far side of `g`: seen from the base, the far side slides left.
//!
//! A point on a leaf receives the map of the component on the base side,
//! and a boundary point equal to a leaf endpoint does likewise.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle_map::{CircleMap, Piece};
use crate::hyperbolic::{ccw_gap, BoundaryPoint, Geodesic, HPoint, MapKind, MoebiusMap, Side};
use crate::lamination::FiniteMeasuredLamination;

/// Tolerance for side tests on images of strata, which accumulate rounding
/// from long products.
const VERIFY_TOL: f64 = 1e-9;
/// Exhaustive pair checks up to this many leaves.
const EXHAUSTIVE_LEAVES: usize = 12;
const SAMPLED_PAIRS: usize = 2000;
const BASE_NUDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub orientation: Orientation,
    /// Point whose complementary component is fixed by the earthquake.
    pub base_point: HPoint,
    /// Leaves (by index) translated against the orientation; for building
    /// deliberately broken fixtures.
    pub flipped_leaves: Vec<usize>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { orientation: Orientation::Left, base_point: HPoint::i(), flipped_leaves: Vec::new() }
    }
}

/// A stratum of the support: the base component, the component beyond a
/// leaf, or a leaf itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stratum {
    Base,
    Beyond(usize),
    Leaf(usize),
}

#[derive(Debug, Clone)]
pub struct EarthquakeMap {
    lamination: FiniteMeasuredLamination,
    base_point: HPoint,
    orientation: Orientation,
    parent: Vec<Option<usize>>,
    far_side: Vec<Side>,
    translations: Vec<MoebiusMap>,
    component_maps: Vec<MoebiusMap>,
    boundary: CircleMap,
    boundary_inverse: CircleMap,
    endpoint_params: Vec<f64>,
}

pub fn build_earthquake(mu: &FiniteMeasuredLamination) -> EarthquakeMap {
    EarthquakeMap::build(mu, &BuildOptions::default())
}

fn opposite(s: Side) -> Side {
    match s {
        Side::Ccw => Side::Cw,
        Side::Cw => Side::Ccw,
        Side::On => Side::On,
    }
}

fn side_of_geodesic(h: &Geodesic, g: &Geodesic) -> Side {
    let (p, q) = g.endpoints();
    match h.side_of_boundary(&p) {
        Side::On => h.side_of_boundary(&q),
        s => s,
    }
}

impl EarthquakeMap {
    pub fn build(mu: &FiniteMeasuredLamination, opts: &BuildOptions) -> Self {
        let leaves = mu.leaves();
        let n = leaves.len();
        let off_leaves = |z: &HPoint| leaves.iter().all(|l| l.geodesic.side_of(z) != Side::On);
        let base_point = if off_leaves(&opts.base_point) {
            opts.base_point
        } else {
            // nudge off the leaf, preferring the direction of increasing real part
            (0..8)
                .map(|k| opts.base_point.travel(k as f64 * std::f64::consts::FRAC_PI_4, BASE_NUDGE))
                .find(off_leaves)
                .expect("a small move leaves a finite union of geodesics")
        };
        let far_side: Vec<Side> =
            leaves.iter().map(|l| opposite(l.geodesic.side_of(&base_point))).collect();

        // j lies beyond k when k separates j from the base
        let beyond = |k: usize, j: usize| {
            k != j && side_of_geodesic(&leaves[k].geodesic, &leaves[j].geodesic) == far_side[k]
        };
        let depth_of = |k: usize| leaves[k].geodesic.distance_to_point(&base_point);
        let parent: Vec<Option<usize>> = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&k| beyond(k, j))
                    .max_by(|&a, &b| depth_of(a).total_cmp(&depth_of(b)))
            })
            .collect();

        let translations: Vec<MoebiusMap> = leaves
            .iter()
            .enumerate()
            .map(|(k, leaf)| {
                let (p, q) = leaf.geodesic.endpoints();
                // far arc runs counterclockwise from the repelling point
                let (mut rep, mut att) = if far_side[k] == Side::Ccw { (p, q) } else { (q, p) };
                let flip = (opts.orientation == Orientation::Right) ^ opts.flipped_leaves.contains(&k);
                if flip {
                    std::mem::swap(&mut rep, &mut att);
                }
                MoebiusMap::translation_along(&rep, &att, leaf.weight).expect("distinct endpoints")
            })
            .collect();

        let generation = |mut k: usize| {
            let mut g = 0;
            while let Some(p) = parent[k] {
                g += 1;
                k = p;
            }
            g
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&k| generation(k));
        let mut component_maps = vec![MoebiusMap::identity(); n];
        for k in order {
            let outer = parent[k].map_or(MoebiusMap::identity(), |p| component_maps[p]);
            component_maps[k] = outer.compose(&translations[k]);
        }

        let mut endpoint_params: Vec<f64> = leaves
            .iter()
            .flat_map(|l| {
                let (p, q) = l.geodesic.endpoints();
                [p.param(), q.param()]
            })
            .collect();
        endpoint_params.sort_by(|a, b| a.total_cmp(b));
        endpoint_params.dedup_by(|a, b| (*a - *b).abs() <= 1e-13);

        let mut quake = Self {
            lamination: mu.clone(),
            base_point,
            orientation: opts.orientation,
            parent,
            far_side,
            translations,
            component_maps,
            boundary: CircleMap::identity(),
            boundary_inverse: CircleMap::identity(),
            endpoint_params,
        };
        quake.boundary = quake.assemble_boundary_map();
        quake.boundary_inverse = quake.boundary.inverse();
        quake
    }

    fn assemble_boundary_map(&self) -> CircleMap {
        let m = self.endpoint_params.len();
        if m == 0 {
            return CircleMap::identity();
        }
        let pieces = (0..m)
            .map(|k| {
                let start = self.endpoint_params[k];
                let gap = if m == 1 { std::f64::consts::TAU } else { ccw_gap(start, self.endpoint_params[(k + 1) % m]) };
                let mid = BoundaryPoint::from_param(start + 0.5 * gap);
                Piece { start, map: self.stratum_map(self.stratum_of_boundary(&mid)) }
            })
            .collect();
        CircleMap::from_pieces(pieces)
    }

    pub fn lamination(&self) -> &FiniteMeasuredLamination {
        &self.lamination
    }

    pub fn base_point(&self) -> HPoint {
        self.base_point
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn parent(&self, leaf: usize) -> Option<usize> {
        self.parent[leaf]
    }

    /// The translation along leaf `k` applied when crossing it outward.
    pub fn leaf_translation(&self, k: usize) -> MoebiusMap {
        self.translations[k]
    }

    pub fn stratum_map(&self, s: Stratum) -> MoebiusMap {
        match s {
            Stratum::Base => MoebiusMap::identity(),
            Stratum::Beyond(k) => self.component_maps[k],
            Stratum::Leaf(k) => self.parent[k].map_or(MoebiusMap::identity(), |p| self.component_maps[p]),
        }
    }

    fn deepest(&self, beyond: impl Fn(usize) -> bool) -> Option<usize> {
        let leaves = self.lamination.leaves();
        (0..leaves.len())
            .filter(|&k| beyond(k))
            .max_by(|&a, &b| {
                let da = leaves[a].geodesic.distance_to_point(&self.base_point);
                let db = leaves[b].geodesic.distance_to_point(&self.base_point);
                da.total_cmp(&db)
            })
    }

    /// Component whose closure at infinity contains `x`, resolving leaf
    /// endpoints to the base side.
    pub fn stratum_of_boundary(&self, x: &BoundaryPoint) -> Stratum {
        let leaves = self.lamination.leaves();
        self.deepest(|k| leaves[k].geodesic.side_of_boundary(x) == self.far_side[k])
            .map_or(Stratum::Base, Stratum::Beyond)
    }

    pub fn stratum_of_point(&self, z: &HPoint) -> Stratum {
        let leaves = self.lamination.leaves();
        if let Some(k) = (0..leaves.len()).find(|&k| leaves[k].geodesic.side_of(z) == Side::On) {
            return Stratum::Leaf(k);
        }
        self.deepest(|k| leaves[k].geodesic.side_of(z) == self.far_side[k])
            .map_or(Stratum::Base, Stratum::Beyond)
    }

    pub fn eval_boundary(&self, x: &BoundaryPoint) -> BoundaryPoint {
        let theta = x.param();
        let near_endpoint = {
            let k = self.endpoint_params.partition_point(|&p| p < theta);
            let m = self.endpoint_params.len();
            m > 0
                && [k % m, (k + m - 1) % m].iter().any(|&j| {
                    BoundaryPoint::from_param(self.endpoint_params[j]).approx_eq(x, crate::hyperbolic::GEOM_TOL)
                })
        };
        if near_endpoint {
            self.stratum_map(self.stratum_of_boundary(x)).apply_boundary(x)
        } else {
            self.boundary.eval(x)
        }
    }

    pub fn eval_interior(&self, z: &HPoint) -> HPoint {
        self.stratum_map(self.stratum_of_point(z)).apply(z)
    }

    pub fn invert_boundary(&self, y: &BoundaryPoint) -> BoundaryPoint {
        self.boundary_inverse.eval(y)
    }

    pub fn boundary_map(&self) -> &CircleMap {
        &self.boundary
    }

    /// Boundary points sampling the closure at infinity of a stratum.
    fn boundary_samples(&self, s: Stratum) -> Vec<BoundaryPoint> {
        let leaves = self.lamination.leaves();
        let far_arc = |k: usize| {
            let (p, q) = leaves[k].geodesic.endpoints();
            if self.far_side[k] == Side::Ccw { (p.param(), q.param()) } else { (q.param(), p.param()) }
        };
        let (start, span, holes): (f64, f64, Vec<usize>) = match s {
            Stratum::Leaf(k) => {
                let (p, q) = leaves[k].geodesic.endpoints();
                return vec![p, q];
            }
            Stratum::Base => {
                let roots: Vec<usize> = (0..leaves.len()).filter(|&k| self.parent[k].is_none()).collect();
                let start = roots.first().map_or(0.0, |&k| far_arc(k).1);
                (start, std::f64::consts::TAU, roots)
            }
            Stratum::Beyond(k) => {
                let (a, b) = far_arc(k);
                let children = (0..leaves.len()).filter(|&j| self.parent[j] == Some(k)).collect();
                (a, ccw_gap(a, b), children)
            }
        };
        let mut cuts: Vec<(f64, f64)> = holes
            .iter()
            .map(|&k| {
                let (a, b) = far_arc(k);
                let ra = ccw_gap(start, a);
                (ra, ra + ccw_gap(a, b))
            })
            .collect();
        cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut samples = vec![start, start + span];
        let mut cursor = 0.0;
        for &(ra, rb) in cuts.iter().chain(std::iter::once(&(span, span))) {
            if ra > cursor {
                for f in [0.25, 0.5, 0.75] {
                    samples.push(start + cursor + f * (ra - cursor));
                }
            }
            samples.push(start + ra);
            samples.push(start + rb);
            cursor = cursor.max(rb);
        }
        samples.into_iter().map(BoundaryPoint::from_param).collect()
    }

    pub fn strata(&self) -> Vec<Stratum> {
        let n = self.lamination.len();
        std::iter::once(Stratum::Base)
            .chain((0..n).map(Stratum::Beyond))
            .chain((0..n).map(Stratum::Leaf))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub first: Stratum,
    pub second: Stratum,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeftReport {
    pub ok: bool,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

fn side_tol(axis: &Geodesic, x: &BoundaryPoint) -> Side {
    let (p, q) = axis.endpoints();
    if x.approx_eq(&p, VERIFY_TOL) || x.approx_eq(&q, VERIFY_TOL) {
        Side::On
    } else {
        axis.side_of_boundary(x)
    }
}

/// The single strict side occupied by `pts`, `Ok(None)` if all lie on the
/// axis, `Err(())` if both sides occur.
fn occupied_side(axis: &Geodesic, pts: &[BoundaryPoint]) -> Result<Option<Side>, ()> {
    let mut seen = None;
    for x in pts {
        match side_tol(axis, x) {
            Side::On => {}
            s if seen.is_none() => seen = Some(s),
            s if seen == Some(s) => {}
            _ => return Err(()),
        }
    }
    Ok(seen)
}

/// Checks every ordered pair of strata (sampled above twelve leaves): the
/// comparison `E|S₂ ∘ (E|S₁)⁻¹` must be the identity or hyperbolic, its axis
/// must weakly separate the image strata, and the image of `S₂` must lie on
/// the counterclockwise side of the axis oriented repelling → attracting,
/// i.e. `(repelling, x, attracting)` is counterclockwise for `x` in `S₂`.
pub fn verify_left(quake: &EarthquakeMap) -> LeftReport {
    verify_left_seeded(quake, 0)
}

pub fn verify_left_seeded(quake: &EarthquakeMap, seed: u64) -> LeftReport {
    let strata = quake.strata();
    let mut pairs: Vec<(Stratum, Stratum)> = strata
        .iter()
        .flat_map(|&a| strata.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
        .collect();
    if quake.lamination.len() > EXHAUSTIVE_LEAVES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
        pairs.truncate(SAMPLED_PAIRS);
    }
    let images: std::collections::HashMap<Stratum, Vec<BoundaryPoint>> = strata
        .iter()
        .map(|&s| {
            let m = quake.stratum_map(s);
            (s, quake.boundary_samples(s).iter().map(|x| m.apply_boundary(x)).collect())
        })
        .collect();

    let mut violations = Vec::new();
    for &(s1, s2) in &pairs {
        let cmp = quake.stratum_map(s2).compose(&quake.stratum_map(s1).inverse());
        let fail = |reason: String| Violation { first: s1, second: s2, reason };
        match cmp.kind() {
            MapKind::Identity => continue,
            MapKind::Hyperbolic => {}
            other => {
                violations.push(fail(format!("comparison map is {other:?}")));
                continue;
            }
        }
        let (rep, att) = cmp.axis().expect("hyperbolic");
        let axis = Geodesic::new(rep, att).expect("distinct fixed points");
        let (a, b) = match (occupied_side(&axis, &images[&s1]), occupied_side(&axis, &images[&s2])) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                violations.push(fail("axis cuts through a stratum".into()));
                continue;
            }
        };
        if a.is_some() && a == b {
            violations.push(fail("axis does not separate the strata".into()));
            continue;
        }
        let second_side = b.or(a.map(opposite));
        if second_side == Some(Side::Cw) {
            violations.push(fail("second stratum moves to the right".into()));
        }
    }
    LeftReport { ok: violations.is_empty(), pairs_checked: pairs.len(), violations }
}

/// Reads each leaf and its weight off the comparison map between the two
/// components it bounds: the axis of `(E|inner)⁻¹ ∘ E|outer` is the leaf and
/// its translation length is the weight.
pub fn recover_measure(quake: &EarthquakeMap) -> FiniteMeasuredLamination {
    let leaves: Vec<(Geodesic, f64)> = (0..quake.lamination.len())
        .filter_map(|k| {
            let inner = quake.stratum_map(quake.parent[k].map_or(Stratum::Base, Stratum::Beyond));
            let outer = quake.stratum_map(Stratum::Beyond(k));
            let cmp = inner.inverse().compose(&outer);
            let (len, kind) = cmp.translation_length();
            if kind != MapKind::Hyperbolic {
                return None;
            }
            let (rep, att) = cmp.axis().ok()?;
            Some((Geodesic::new(rep, att).ok()?, len))
        })
        .collect();
    FiniteMeasuredLamination::new(leaves).expect("axes of a valid earthquake are disjoint leaves")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(w: f64) -> FiniteMeasuredLamination {
        FiniteMeasuredLamination::new(vec![(Geodesic::from_reals(0.0, f64::INFINITY).unwrap(), w)]).unwrap()
    }

    #[test]
    fn empty_lamination_is_identity() {
        let e = build_earthquake(&FiniteMeasuredLamination::empty());
        let x = BoundaryPoint::from_real(0.37);
        assert!(e.eval_boundary(&x).approx_eq(&x, 0.0));
        assert!(verify_left(&e).ok);
        assert!(recover_measure(&e).is_empty());
        assert!(e.invert_boundary(&x).approx_eq(&x, 0.0));
    }

    #[test]
    fn single_leaf_boundary_action() {
        let w = 0.8;
        let opts = BuildOptions { base_point: HPoint::new(1.0, 1.0).unwrap(), ..BuildOptions::default() };
        let e = EarthquakeMap::build(&single(w), &opts);
        for t in [0.0, 1.0, 3.5] {
            let x = BoundaryPoint::from_real(t);
            assert!(e.eval_boundary(&x).approx_eq(&x, 1e-15));
        }
        assert!(e.eval_boundary(&BoundaryPoint::infinity()).is_infinity());
        // the far half-line slides towards 0
        for t in [-0.5, -2.0, -10.0] {
            let y = e.eval_boundary(&BoundaryPoint::from_real(t)).real().unwrap();
            assert!((y - t * (-w).exp()).abs() < 1e-13);
        }
        // the default base point i lies on the leaf and is nudged to the right side
        let d = build_earthquake(&single(w));
        let y = d.eval_boundary(&BoundaryPoint::from_real(-2.0)).real().unwrap();
        assert!((y + 2.0 * (-w).exp()).abs() < 1e-13);
    }

    #[test]
    fn single_leaf_interior_and_inverse() {
        let w = 0.8;
        let e = build_earthquake(&single(w));
        let z = HPoint::new(-1.0, 1.0).unwrap();
        let img = e.eval_interior(&z);
        assert!((img.x + (-w).exp()).abs() < 1e-14 && (img.y - (-w).exp()).abs() < 1e-14);
        let p = HPoint::new(2.0, 0.5).unwrap();
        assert_eq!(e.eval_interior(&p), p);
        // closed-form inverse: y ↦ e^{w} y on the negative side
        let y = BoundaryPoint::from_real(-0.3);
        assert!((e.invert_boundary(&y).real().unwrap() + 0.3 * w.exp()).abs() < 1e-13);
    }

    #[test]
    fn merged_copies_equal_one_heavy_leaf() {
        let g = Geodesic::from_reals(-1.0, 2.0).unwrap();
        let split = FiniteMeasuredLamination::new(vec![(g, 0.3), (g, 0.4)]).unwrap();
        let whole = FiniteMeasuredLamination::new(vec![(g, 0.7)]).unwrap();
        let (a, b) = (build_earthquake(&split), build_earthquake(&whole));
        let x = BoundaryPoint::from_real(0.5);
        assert!(a.eval_boundary(&x).approx_eq(&b.eval_boundary(&x), 1e-14));
    }

    #[test]
    fn flipped_leaf_is_reported() {
        let mu = FiniteMeasuredLamination::new(vec![
            (Geodesic::from_reals(-1.0, 1.0).unwrap(), 0.5),
            (Geodesic::from_reals(2.0, 3.0).unwrap(), 0.7),
        ])
        .unwrap();
        let opts = BuildOptions { flipped_leaves: vec![1], ..BuildOptions::default() };
        let e = EarthquakeMap::build(&mu, &opts);
        let report = verify_left(&e);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| (v.first, v.second) == (Stratum::Base, Stratum::Beyond(1))));
        let good = verify_left(&build_earthquake(&mu));
        assert!(good.ok, "{:?}", good.violations);
    }

    #[test]
    fn right_earthquakes_fail_the_left_test() {
        let opts = BuildOptions { orientation: Orientation::Right, ..BuildOptions::default() };
        let e = EarthquakeMap::build(&single(0.4), &opts);
        assert!(!verify_left(&e).ok);
    }

    #[test]
    fn single_leaf_recovery() {
        let r = recover_measure(&build_earthquake(&single(1.3)));
        assert!(r.approx_eq(&single(1.3), 1e-12));
    }
}
