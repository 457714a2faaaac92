//! Douady–Earle extension, numerical Beltrami coefficients and the
//! dilatation proxy.
//!
//! Circle maps are transported to the unit disk by the Cayley transform, where
//! every piece becomes a disk automorphism `u ↦ (αu + β)/(γu + δ)` with
//! `|γ| < |δ|`. The mean of such a piece over an arc has a closed form, so
//! the barycenter residual is evaluated exactly; only the Newton Jacobian
//! uses the uniform quadrature.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};
use crate::hyperbolic::{ccw_gap, DPoint};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
/// Below this `|γ/δ|` the logarithmic integral is summed as a series.
const SERIES_CUTOFF: f64 = 1e-3;
const MAX_HALVINGS: usize = 60;
const POLISH_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub quadrature_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Finite-difference step at `z` is `step_scale·(1 − |z|)`.
    pub step_scale: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self { quadrature_n: 512, tol: 1e-9, max_iter: 100, step_scale: 1e-4 }
    }
}

impl DeParams {
    fn validate(&self) -> Result<()> {
        if self.quadrature_n < 64 {
            return Err(Error::InvalidParameter(format!("quadrature_n = {} < 64", self.quadrature_n)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol = {} must be positive", self.tol)));
        }
        if !(self.step_scale > 0.0 && self.step_scale < 0.5) {
            return Err(Error::InvalidParameter(format!("step_scale = {} out of range", self.step_scale)));
        }
        Ok(())
    }

    pub fn step_at(&self, z: &DPoint) -> f64 {
        self.step_scale * (1.0 - z.as_complex().norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltramiSample {
    pub point: DPoint,
    pub value: Complex64,
}

/// Complex 2×2 matrix acting by linear fractional transformation.
#[derive(Debug, Clone, Copy)]
struct Mat {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Mat {
    fn mul(&self, o: &Mat) -> Mat {
        let m = Mat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        };
        let s = (m.a * m.d - m.b * m.c).sqrt().inv();
        Mat { a: m.a * s, b: m.b * s, c: m.c * s, d: m.d * s }
    }

    fn apply(&self, u: Complex64) -> Complex64 {
        (self.a * u + self.b) / (self.c * u + self.d)
    }

    /// `u ↦ (u − w)/(1 − w̄u)`, moving `w` to 0.
    fn recenter(w: Complex64) -> Mat {
        Mat { a: ONE, b: -w, c: -w.conj(), d: ONE }
    }

    /// `u ↦ (u + z)/(z̄u + 1)`, moving 0 to `z`.
    fn from_origin(z: Complex64) -> Mat {
        Mat { a: ONE, b: z, c: z.conj(), d: ONE }
    }

    /// Cayley conjugate of a real Möbius map.
    fn from_moebius(m: &crate::hyperbolic::MoebiusMap) -> Mat {
        let c = Mat { a: ONE, b: -I, c: ONE, d: I };
        let c_inv = Mat { a: I, b: I, c: -ONE, d: ONE };
        let r = |x: f64| Complex64::new(x, 0.0);
        c.mul(&Mat { a: r(m.a), b: r(m.b), c: r(m.c), d: r(m.d) }).mul(&c_inv)
    }

    /// `(1/2π) ∫ T(e^{iθ}) dθ` over the arc of angles `[a, a + span]`.
    fn arc_integral(&self, a: f64, span: f64) -> Complex64 {
        let r = self.c / self.d;
        let u1 = Complex64::from_polar(1.0, a);
        let u2 = Complex64::from_polar(1.0, a + span);
        let log_diff = ((ONE + r * u2) / (ONE + r * u1)).ln();
        let i0 = Complex64::new(span, 0.0) + I * log_diff;
        let i1 = if r.norm() < SERIES_CUTOFF {
            // ∫ u/(1 + ru) dθ = −i Σ (−r)^{k} (u2^{k+1} − u1^{k+1})/(k+1)
            let mut sum = Complex64::new(0.0, 0.0);
            let (mut p1, mut p2, mut rk) = (u1, u2, ONE);
            for k in 0..8 {
                sum += rk * (p2 - p1) / (k as f64 + 1.0);
                p1 *= u1;
                p2 *= u2;
                rk *= -r;
            }
            -I * sum
        } else {
            -I * log_diff / r
        };
        (self.a * i1 + self.b * i0) / self.d / TAU
    }
}

/// A circle map in disk coordinates: piece `k` covers the angles from
/// `starts[k]` counterclockwise to `starts[k + 1]`.
#[derive(Debug, Clone)]
struct DiskMap {
    starts: Vec<f64>,
    maps: Vec<Mat>,
}

impl DiskMap {
    fn from_circle_map(h: &CircleMap) -> Self {
        // the circular parameter of a boundary point is its disk angle
        let pieces = h.pieces();
        Self { starts: pieces.iter().map(|p| p.start).collect(), maps: pieces.iter().map(|p| Mat::from_moebius(&p.map)).collect() }
    }

    /// `post ∘ self ∘ pre`, where `pre_inv` is the inverse of `pre`.
    fn conjugated(&self, pre: &Mat, pre_inv: &Mat, post: &Mat) -> Self {
        let mut pieces: Vec<(f64, Mat)> = self
            .starts
            .iter()
            .zip(&self.maps)
            .map(|(&s, m)| {
                let u = pre_inv.apply(Complex64::from_polar(1.0, s));
                (u.arg().rem_euclid(TAU), post.mul(m).mul(pre))
            })
            .collect();
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        Self { starts: pieces.iter().map(|p| p.0).collect(), maps: pieces.iter().map(|p| p.1).collect() }
    }

    fn locate(&self, theta: f64) -> usize {
        let k = self.starts.partition_point(|&s| s <= theta);
        if k == 0 {
            self.starts.len() - 1
        } else {
            k - 1
        }
    }

    fn eval(&self, u: Complex64) -> Complex64 {
        self.maps[self.locate(u.arg().rem_euclid(TAU))].apply(u)
    }

    fn mean(&self) -> Complex64 {
        let m = self.starts.len();
        if m == 1 {
            return self.maps[0].arc_integral(0.0, TAU);
        }
        (0..m)
            .map(|k| {
                let mut span = ccw_gap(self.starts[k], self.starts[(k + 1) % m]);
                if span > TAU - 1e-12 {
                    // coincident breakpoints reordered by rounding
                    span = 0.0;
                }
                self.maps[k].arc_integral(self.starts[k], span)
            })
            .sum()
    }

    fn mean_square(&self, n: usize) -> Complex64 {
        let s: Complex64 = (0..n)
            .map(|j| {
                let v = self.eval(Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / n as f64));
                v * v
            })
            .sum();
        s / n as f64
    }
}

/// Residual of the barycenter equation for `h` seen from `z` at candidate
/// `w`, as the recentered map.
fn recentered(h: &DiskMap, z: Complex64, w: Complex64) -> DiskMap {
    h.conjugated(&Mat::from_origin(z), &Mat::from_origin(-z), &Mat::recenter(w))
}

fn solve(h: &DiskMap, z: Complex64, params: &DeParams) -> Result<Complex64> {
    let mut w = h.conjugated(&Mat::from_origin(z), &Mat::from_origin(-z), &Mat::recenter(Complex64::new(0.0, 0.0))).mean();
    if w.norm() > 1.0 - 1e-6 {
        w *= (1.0 - 1e-6) / w.norm();
    }
    let mut g = recentered(h, z, w);
    let mut v = g.mean();
    let mut converged_at = None;
    for it in 0..params.max_iter {
        if v.norm() <= params.tol && converged_at.is_none() {
            converged_at = Some(it);
        }
        if converged_at.is_some_and(|c| it >= c + POLISH_STEPS) {
            break;
        }
        let m2 = g.mean_square(params.quadrature_n);
        let (p, q) = (m2.re, m2.im);
        let det = (1.0 - p) * (1.0 + p) - q * q;
        let mut delta = if det.abs() > 1e-14 {
            let x = ((1.0 + p) * v.re + q * v.im) / det;
            let y = (q * v.re + (1.0 - p) * v.im) / det;
            Complex64::new(x, y)
        } else {
            v
        };
        if delta.norm() > 0.9 {
            delta *= 0.9 / delta.norm();
        }
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = (delta + w) / (ONE + w.conj() * delta);
            let gc = recentered(h, z, cand);
            let vc = gc.mean();
            if vc.norm() < v.norm() {
                (w, g, v) = (cand, gc, vc);
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = recentered(h, z, w).mean().norm();
    if !(residual <= params.tol) {
        return Err(Error::Convergence { iterations: params.max_iter, residual });
    }
    Ok(w)
}

/// Value at `z` of the Douady–Earle extension of `h`.
pub fn de_extend(h: &CircleMap, z: &DPoint, params: &DeParams) -> Result<DPoint> {
    params.validate()?;
    solve(&DiskMap::from_circle_map(h), z.as_complex(), params).map(DPoint::from_complex)
}

/// Beltrami coefficient `∂̄f/∂f` of `f` at `z` by central differences.
pub fn beltrami_of_interior_map(f: impl Fn(Complex64) -> Result<Complex64>, z: Complex64, step: f64) -> Result<Complex64> {
    let fx = (f(z + step)? - f(z - step)?) / (2.0 * step);
    let fy = (f(z + I * step)? - f(z - I * step)?) / (2.0 * step);
    let d = (fx - I * fy) * 0.5;
    let dbar = (fx + I * fy) * 0.5;
    Ok(dbar / d)
}

/// Beltrami coefficient at `z` of the Douady–Earle extension of `h`, with
/// finite-difference step `step` at `z`.
///
/// The map is first renormalized by disk automorphisms so that `z` and its
/// image sit at the origin; the coefficient is unchanged because the
/// derivative of the pre-composed automorphism at `z` is real.
pub fn beltrami(h: &CircleMap, z: &DPoint, step: f64, params: &DeParams) -> Result<BeltramiSample> {
    params.validate()?;
    let zc = z.as_complex();
    let disk = DiskMap::from_circle_map(h);
    let w0 = solve(&disk, zc, params)?;
    let g = disk.conjugated(&Mat::from_origin(zc), &Mat::from_origin(-zc), &Mat::recenter(w0));
    let local_step = step / (1.0 - zc.norm_sqr());
    let value = beltrami_of_interior_map(|u| solve(&g, u, params), Complex64::new(0.0, 0.0), local_step)?;
    if !(value.norm() < 1.0) {
        return Err(Error::NumericalBreakdown { magnitude: value.norm() });
    }
    Ok(BeltramiSample { point: *z, value })
}

/// Center plus rings `|z| ∈ {0.3, 0.6, 0.9}` of 16 points each.
pub fn default_grid() -> Vec<DPoint> {
    ring_grid(&[0.3, 0.6, 0.9], 16)
}

pub fn ring_grid(radii: &[f64], per_ring: usize) -> Vec<DPoint> {
    let mut grid = vec![DPoint::origin()];
    for &r in radii {
        for k in 0..per_ring {
            let w = Complex64::from_polar(r, TAU * k as f64 / per_ring as f64);
            grid.push(DPoint::from_complex(w));
        }
    }
    grid
}

/// Largest sampled Beltrami magnitude of the extension of `h` over `grid`.
pub fn max_beltrami(h: &CircleMap, grid: &[DPoint], params: &DeParams) -> Result<f64> {
    let values: Vec<f64> = grid
        .par_iter()
        .map(|z| beltrami(h, z, params.step_at(z), params).map(|s| s.value.norm()))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// `atanh β` for `β` the largest sampled Beltrami magnitude of the
/// extension of `h₁ ∘ h₂⁻¹`.
pub fn distance_proxy(h1: &CircleMap, h2: &CircleMap, grid: &[DPoint], params: &DeParams) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty sampling grid".into()));
    }
    let h = h1.compose(&h2.inverse());
    Ok(max_beltrami(&h, grid, params)?.atanh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::MoebiusMap;

    fn moebius() -> MoebiusMap {
        MoebiusMap::new(2.0, 1.0, 0.5, 0.75).unwrap()
    }

    fn two_piece(w: f64) -> CircleMap {
        CircleMap::from_pieces(vec![
            crate::circle_map::Piece { start: std::f64::consts::PI, map: MoebiusMap::identity() },
            crate::circle_map::Piece { start: 0.0, map: MoebiusMap::dilation(-w) },
        ])
    }

    #[test]
    fn closed_form_mean_matches_quadrature() {
        let h = DiskMap::from_circle_map(&two_piece(0.9));
        let g = recentered(&h, Complex64::new(0.2, -0.4), Complex64::new(0.1, 0.3));
        let n = 200_000;
        let q: Complex64 =
            (0..n).map(|j| g.eval(Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / n as f64))).sum::<Complex64>() / n as f64;
        assert!((g.mean() - q).norm() < 1e-6, "{} vs {}", g.mean(), q);
    }

    #[test]
    fn identity_and_moebius_are_reproduced() {
        let p = DeParams::default();
        let z = DPoint::new(0.3, -0.5).unwrap();
        let w = de_extend(&CircleMap::identity(), &z, &p).unwrap();
        assert!((w.as_complex() - z.as_complex()).norm() < 1e-12);
        let m = moebius();
        let w = de_extend(&CircleMap::from_moebius(m), &z, &p).unwrap();
        let expected = Mat::from_moebius(&m).apply(z.as_complex());
        assert!((w.as_complex() - expected).norm() < 1e-10);
    }

    #[test]
    fn moebius_has_zero_beltrami() {
        let p = DeParams::default();
        let z = DPoint::new(-0.6, 0.2).unwrap();
        let s = beltrami(&CircleMap::from_moebius(moebius()), &z, p.step_at(&z), &p).unwrap();
        assert!(s.value.norm() < 1e-6);
    }

    #[test]
    fn affine_fixture_coefficient() {
        let k = Complex64::new(0.3, -0.2);
        let mu = beltrami_of_interior_map(|z| Ok(z + k * z.conj()), Complex64::new(0.1, 0.2), 1e-4).unwrap();
        assert!((mu - k).norm() < 1e-10);
    }

    #[test]
    fn bent_map_is_not_conformal() {
        let p = DeParams::default();
        let s = beltrami(&two_piece(1.0), &DPoint::origin(), 1e-4, &p).unwrap();
        assert!(s.value.norm() > 1e-3 && s.value.norm() < 1.0);
    }

    #[test]
    fn proxy_vanishes_on_equal_maps() {
        let p = DeParams::default();
        let h = two_piece(0.7);
        let grid = ring_grid(&[0.5], 4);
        assert!(distance_proxy(&h, &h, &grid, &p).unwrap() < 1e-6);
    }

    #[test]
    fn bad_parameters_rejected() {
        let p = DeParams { quadrature_n: 16, ..DeParams::default() };
        assert!(matches!(de_extend(&CircleMap::identity(), &DPoint::origin(), &p), Err(Error::InvalidParameter(_))));
    }
}
