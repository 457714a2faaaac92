//! Built-in lamination families and random inputs.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::hyperbolic::{ccw_gap, from_disk, BoundaryPoint, DPoint, Geodesic, MoebiusMap};
use crate::lamination::FiniteMeasuredLamination;

/// Endpoints of random leaves keep at least this circular separation.
const MIN_GAP: f64 = 1e-2;

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = ccw_gap(a, b);
    d.min(TAU - d)
}

/// Random Möbius map: a rotation about `i` followed by a move of `i` to a
/// point of hyperbolic distance at most `reach` from `i`.
pub fn random_moebius<R: Rng>(rng: &mut R, reach: f64) -> MoebiusMap {
    let r = (0.5 * rng.gen_range(0.0..=reach)).tanh();
    let w = Complex64::from_polar(r, rng.gen_range(0.0..TAU));
    let p = from_disk(&DPoint::new(w.re, w.im).expect("inside the disk"));
    MoebiusMap::to_i(&p).inverse().compose(&MoebiusMap::rotation_about_i(rng.gen_range(0.0..PI)))
}

/// Up to `max_leaves` pairwise disjoint leaves with endpoints uniform on the
/// circle and weights uniform in `[0.05, max_weight]`.
pub fn random_lamination<R: Rng>(rng: &mut R, max_leaves: usize, max_weight: f64) -> FiniteMeasuredLamination {
    let target = rng.gen_range(1..=max_leaves.max(1));
    let mut leaves: Vec<(Geodesic, f64)> = Vec::with_capacity(target);
    let mut params: Vec<f64> = Vec::new();
    let mut attempts = 0;
    while leaves.len() < target && attempts < 200 * target {
        attempts += 1;
        let (a, b) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let close = |x: f64| params.iter().any(|&p| circular_gap(p, x) < MIN_GAP);
        if circular_gap(a, b) < MIN_GAP || close(a) || close(b) {
            continue;
        }
        let g = Geodesic::new(BoundaryPoint::from_param(a), BoundaryPoint::from_param(b)).expect("distinct endpoints");
        if leaves.iter().any(|(h, _)| h.crosses(&g)) {
            continue;
        }
        params.extend([a, b]);
        leaves.push((g, rng.gen_range(0.05..=max_weight.max(0.05))));
    }
    FiniteMeasuredLamination::new(leaves).expect("disjoint leaves with positive weights")
}

/// A random lamination rescaled so that its Thurston norm is at most `cap`.
pub fn random_lamination_with_norm<R: Rng>(rng: &mut R, max_leaves: usize, cap: f64) -> FiniteMeasuredLamination {
    let mu = random_lamination(rng, max_leaves, cap);
    let norm = mu.thurston_norm();
    if norm <= cap {
        mu
    } else {
        mu.scale(cap / norm).expect("positive factor")
    }
}

/// Nested leaves `(−2^{−k}, 2^{−k})`, `k = 1..=weights.len()`, accumulating
/// at 0.
pub fn geodesic_stack(weights: &[f64]) -> FiniteMeasuredLamination {
    let leaves = weights
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let r = 0.5f64.powi(k as i32 + 1);
            (Geodesic::from_reals(-r, r).expect("distinct"), w)
        })
        .collect();
    FiniteMeasuredLamination::new(leaves).expect("nested leaves are disjoint")
}

/// Stack with weights `c·r^k`.
pub fn decaying_stack(n: usize, c: f64, r: f64) -> FiniteMeasuredLamination {
    geodesic_stack(&(0..n).map(|k| c * r.powi(k as i32)).collect::<Vec<_>>())
}

pub fn constant_stack(n: usize, c: f64) -> FiniteMeasuredLamination {
    geodesic_stack(&vec![c; n])
}

/// Leaves of the disk accumulating at the boundary point 1: leaf `k` is the
/// circle orthogonal to the unit circle whose point nearest the origin is
/// `1 − δ_k`, with `δ_k = 0.5·2^{−k/2}`, `k = 0..n`, and weight `c·δ_k^α`.
pub fn power_stack(n: usize, c: f64, alpha: f64) -> FiniteMeasuredLamination {
    let leaves = (0..n)
        .map(|k| {
            let delta = 0.5 * 2f64.powf(-(k as f64) / 2.0);
            let apex = 1.0 - delta;
            let center = 0.5 * (apex + 1.0 / apex);
            let angle = (1.0 / center).acos();
            let end = |a: f64| BoundaryPoint::from_disk(Complex64::from_polar(1.0, a));
            (Geodesic::new(end(-angle), end(angle)).expect("distinct"), c * delta.powf(alpha))
        })
        .collect();
    FiniteMeasuredLamination::new(leaves).expect("nested leaves are disjoint")
}

pub fn single_leaf(w: f64) -> FiniteMeasuredLamination {
    FiniteMeasuredLamination::new(vec![(Geodesic::from_reals(0.0, f64::INFINITY).expect("distinct"), w)])
        .expect("valid")
}

/// Five disjoint leaves, two of them nested, total norm well below 2.
pub fn five_leaf(scale: f64) -> FiniteMeasuredLamination {
    let table = [(-3.0, -1.0, 0.4), (-0.5, 0.5, 0.5), (-0.25, 0.25, 0.3), (1.0, 2.0, 0.45), (4.0, f64::INFINITY, 0.35)];
    let leaves = table
        .iter()
        .map(|&(a, b, w)| (Geodesic::from_reals(a, b).expect("distinct"), scale * w))
        .collect();
    FiniteMeasuredLamination::new(leaves).expect("disjoint leaves")
}
