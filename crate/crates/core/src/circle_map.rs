//! Piecewise Möbius homeomorphisms of the boundary circle.
//!
//! Earthquake boundary maps, Möbius maps, their compositions and inverses are
//! all of this form, so the whole class is closed under the operations the
//! experiments need and can be evaluated exactly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::hyperbolic::{ccw_gap, BoundaryPoint, MoebiusMap};

/// Breakpoints closer than this (in circular parameter) are merged.
const BREAK_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Piece {
    /// Circular parameter where the piece starts; it ends where the next
    /// piece starts.
    pub start: f64,
    pub map: MoebiusMap,
}

/// An orientation-preserving circle homeomorphism given by a Möbius map on
/// each arc between consecutive breakpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleMap {
    pieces: Vec<Piece>,
    /// Evaluation tolerance: breakpoint merging and continuity checks.
    pub tolerance: f64,
}

impl CircleMap {
    pub fn identity() -> Self {
        Self::from_moebius(MoebiusMap::identity())
    }

    pub fn from_moebius(map: MoebiusMap) -> Self {
        Self { pieces: vec![Piece { start: 0.0, map }], tolerance: BREAK_TOL }
    }

    /// Builds from `(start parameter, map)` pairs in any order.
    pub fn from_pieces(mut pieces: Vec<Piece>) -> Self {
        assert!(!pieces.is_empty(), "a circle map needs at least one piece");
        for p in &mut pieces {
            p.start = p.start.rem_euclid(TAU);
        }
        pieces.sort_by(|a, b| a.start.total_cmp(&b.start));
        Self { pieces, tolerance: BREAK_TOL }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Breakpoint parameters; empty for a single Möbius map.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.pieces.len() == 1 {
            Vec::new()
        } else {
            self.pieces.iter().map(|p| p.start).collect()
        }
    }

    /// Index of the piece containing parameter `theta`.
    pub fn locate(&self, theta: f64) -> usize {
        let theta = theta.rem_euclid(TAU);
        let k = self.pieces.partition_point(|p| p.start <= theta);
        if k == 0 {
            self.pieces.len() - 1
        } else {
            k - 1
        }
    }

    pub fn eval(&self, x: &BoundaryPoint) -> BoundaryPoint {
        self.pieces[self.locate(x.param())].map.apply_boundary(x)
    }

    pub fn inverse(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                start: if self.pieces.len() == 1 {
                    0.0
                } else {
                    p.map.apply_boundary(&BoundaryPoint::from_param(p.start)).param()
                },
                map: p.map.inverse(),
            })
            .collect();
        Self::from_pieces(pieces)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CircleMap) -> Self {
        let mut breaks = inner.breakpoints();
        let outer_breaks = self.breakpoints();
        if !outer_breaks.is_empty() {
            let inv = inner.inverse();
            breaks.extend(outer_breaks.iter().map(|&b| inv.eval(&BoundaryPoint::from_param(b)).param()));
        }
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup_by(|a, b| (*a - *b).abs() <= BREAK_TOL);
        if breaks.len() > 1 && ccw_gap(breaks[breaks.len() - 1], breaks[0]) <= BREAK_TOL {
            breaks.pop();
        }
        if breaks.is_empty() {
            return Self::from_moebius(self.pieces[0].map.compose(&inner.pieces[0].map));
        }
        let m = breaks.len();
        let pieces = (0..m)
            .map(|k| {
                let start = breaks[k];
                let gap = if m == 1 { TAU } else { ccw_gap(start, breaks[(k + 1) % m]) };
                let mid = start + 0.5 * gap;
                let inner_map = inner.pieces[inner.locate(mid)].map;
                let y = inner_map.apply_boundary(&BoundaryPoint::from_param(mid));
                let outer_map = self.pieces[self.locate(y.param())].map;
                Piece { start, map: outer_map.compose(&inner_map) }
            })
            .collect();
        Self::from_pieces(pieces)
    }

    pub fn post_compose(&self, a: &MoebiusMap) -> Self {
        Self {
            pieces: self.pieces.iter().map(|p| Piece { start: p.start, map: a.compose(&p.map) }).collect(),
            tolerance: self.tolerance,
        }
    }

    pub fn pre_compose(&self, b: &MoebiusMap) -> Self {
        self.compose(&Self::from_moebius(*b))
    }

    /// Largest jump between the one-sided values at breakpoints, measured
    /// projectively; zero for a genuine homeomorphism up to rounding.
    pub fn continuity_defect(&self) -> f64 {
        let m = self.pieces.len();
        if m == 1 {
            return 0.0;
        }
        (0..m)
            .map(|k| {
                let x = BoundaryPoint::from_param(self.pieces[k].start);
                let prev = self.pieces[(k + m - 1) % m].map.apply_boundary(&x);
                let here = self.pieces[k].map.apply_boundary(&x);
                prev.projective_distance(&here)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_piece(w: f64) -> CircleMap {
        // x ↦ x on [0, ∞], x ↦ e^{-w} x on [−∞, 0]
        CircleMap::from_pieces(vec![
            Piece { start: std::f64::consts::PI, map: MoebiusMap::identity() },
            Piece { start: 0.0, map: MoebiusMap::dilation(-w) },
        ])
    }

    #[test]
    fn eval_and_inverse() {
        let h = two_piece(0.7);
        let x = BoundaryPoint::from_real(-2.0);
        let y = h.eval(&x);
        assert!((y.real().unwrap() + 2.0 * (-0.7f64).exp()).abs() < 1e-14);
        assert!(h.inverse().eval(&y).approx_eq(&x, 1e-14));
        assert!(h.eval(&BoundaryPoint::from_real(3.0)).approx_eq(&BoundaryPoint::from_real(3.0), 1e-15));
        assert!(h.continuity_defect() < 1e-15);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let h = two_piece(1.1).post_compose(&MoebiusMap::rotation_about_i(0.4));
        let id = h.compose(&h.inverse());
        for t in [-5.0, -0.3, 0.0, 0.2, 7.0] {
            let x = BoundaryPoint::from_real(t);
            assert!(id.eval(&x).approx_eq(&x, 1e-13));
        }
    }
}
