//! Closed-form geometry of the hyperbolic plane.
//!
//! Points of the upper half-plane are [`HPoint`]s, points of the unit disk
//! are [`DPoint`]s and points at infinity are projective [`BoundaryPoint`]s,
//! so that `∞` is an ordinary value. Isometries are real unimodular
//! [`MoebiusMap`]s acting on all three.
//!
//! The boundary circle carries a circular parameter in `[0, 2π)`: the
//! argument of the Cayley image `(t - i) / (t + i)` of a boundary point `t`.
//! Increasing reals move counterclockwise, `0` sits at `π` and `∞` at `0`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for geometric equality.
pub const GEOM_TOL: f64 = 1e-10;
/// Default relative tolerance for cross-ratio and Liouville checks.
pub const LIOUVILLE_TOL: f64 = 1e-12;
/// Tolerance on `L(Q) = 1` accepted by [`moebius_from_box`].
pub const BOX_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point of `R ∪ {∞}` stored as a canonical projective pair `(x : y)`
/// with `x² + y² = 1`, `y ≥ 0`, and `(1 : 0)` for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    x: f64,
    y: f64,
}

impl BoundaryPoint {
    /// Canonicalizes the projective pair `(x : y)`.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidPoint(format!("projective pair ({x}, {y})")));
        }
        let (mut x, mut y) = (x / norm, y / norm);
        if y < 0.0 || (y == 0.0 && x < 0.0) {
            x = -x;
            y = -y;
        }
        if y == 0.0 {
            x = 1.0;
        }
        Ok(Self { x, y })
    }

    pub fn from_real(t: f64) -> Self {
        if t.is_infinite() {
            return Self::infinity();
        }
        Self::new(t, 1.0).expect("finite real")
    }

    pub fn infinity() -> Self {
        Self { x: 1.0, y: 0.0 }
    }

    pub fn pair(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn is_infinity(&self) -> bool {
        self.y == 0.0
    }

    /// The real value, or `None` at infinity.
    pub fn real(&self) -> Option<f64> {
        (self.y != 0.0).then(|| self.x / self.y)
    }

    /// Circular parameter in `[0, 2π)`, counterclockwise.
    pub fn param(&self) -> f64 {
        let phi = 2.0 * self.y.atan2(-self.x);
        if phi >= TAU {
            phi - TAU
        } else {
            phi
        }
    }

    pub fn from_param(phi: f64) -> Self {
        let half = 0.5 * phi.rem_euclid(TAU);
        Self::new(-half.cos(), half.sin()).expect("unit pair")
    }

    /// The corresponding point of the unit circle.
    pub fn to_disk(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.param())
    }

    pub fn from_disk(w: Complex64) -> Self {
        Self::from_param(w.arg())
    }

    /// Projective distance `|x₁y₂ − x₂y₁|`, the sine of half the circular gap.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        cross(self, other).abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.real() {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "inf"),
        }
    }
}

/// `x₁y₂ − y₁x₂`; for finite points equals `y₁y₂ (t₁ − t₂)`.
pub fn cross(p: &BoundaryPoint, q: &BoundaryPoint) -> f64 {
    p.x * q.y - p.y * q.x
}

/// Counterclockwise gap from `from` to `to` in `[0, 2π)`.
pub fn ccw_gap(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(TAU)
}

/// True when `a, b, c` are distinct and in counterclockwise order.
pub fn is_ccw(a: &BoundaryPoint, b: &BoundaryPoint, c: &BoundaryPoint) -> bool {
    let (pa, pb, pc) = (a.param(), b.param(), c.param());
    let gb = ccw_gap(pa, pb);
    let gc = ccw_gap(pa, pc);
    gb > 0.0 && gc > 0.0 && gb < gc
}

/// A point `x + iy` of the upper half-plane, metric `|dz| / y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(Error::InvalidPoint(format!("({x}, {y}) is not in the upper half-plane")));
        }
        Ok(Self { x, y })
    }

    pub fn i() -> Self {
        Self { x: 0.0, y: 1.0 }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub(crate) fn from_complex(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }

    pub fn distance(&self, other: &HPoint) -> f64 {
        hyp_distance(self, other)
    }

    /// Euclidean distance of the disk image to the unit circle, computed
    /// without cancellation near the boundary.
    pub fn boundary_depth(&self) -> f64 {
        let z = self.as_complex();
        let denom = (z + I).norm_sqr();
        let one_minus_sq = 4.0 * self.y / denom;
        let w = ((z - I) / (z + I)).norm();
        one_minus_sq / (1.0 + w)
    }

    /// Endpoint of the geodesic segment of hyperbolic length `len` leaving
    /// `self` in the direction making angle `dir` with the positive real axis.
    pub fn travel(&self, dir: f64, len: f64) -> HPoint {
        let to_i = MoebiusMap::to_i(self);
        let rot = MoebiusMap::rotation_about_i(0.5 * (dir - 0.5 * PI));
        let up = Complex64::new(0.0, len.exp());
        let z = to_i.inverse().apply_complex(rot.apply_complex(up));
        HPoint::from_complex(z)
    }
}

/// A point `u + iv` of the unit disk, metric `2|dz| / (1 − |z|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DPoint {
    pub u: f64,
    pub v: f64,
}

impl DPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite() && u * u + v * v < 1.0) {
            return Err(Error::InvalidPoint(format!("({u}, {v}) is not in the unit disk")));
        }
        Ok(Self { u, v })
    }

    pub fn origin() -> Self {
        Self { u: 0.0, v: 0.0 }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub(crate) fn from_complex(w: Complex64) -> Self {
        Self { u: w.re, v: w.im }
    }

    pub fn distance(&self, other: &DPoint) -> f64 {
        let (a, b) = (self.as_complex(), other.as_complex());
        let ratio = (a - b).norm() / (Complex64::new(1.0, 0.0) - a.conj() * b).norm();
        2.0 * ratio.min(1.0).atanh()
    }
}

/// Cayley transform `z ↦ (z − i)/(z + i)`.
pub fn to_disk(p: &HPoint) -> DPoint {
    let z = p.as_complex();
    DPoint::from_complex((z - I) / (z + I))
}

/// Inverse Cayley transform `w ↦ i(1 + w)/(1 − w)`.
pub fn from_disk(p: &DPoint) -> HPoint {
    let w = p.as_complex();
    let one = Complex64::new(1.0, 0.0);
    HPoint::from_complex(I * (one + w) / (one - w))
}

pub fn hyp_distance(p: &HPoint, q: &HPoint) -> f64 {
    let chord = (p.as_complex() - q.as_complex()).norm();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Unoriented angle at `i` between the geodesic rays towards `x` and `y`.
///
/// The Cayley transform is conformal and sends `i` to the origin, where
/// geodesic rays are radii, so this is the circular gap folded into `[0, π]`.
pub fn angle_metric(x: &BoundaryPoint, y: &BoundaryPoint) -> f64 {
    let d = ccw_gap(x.param(), y.param());
    d.min(TAU - d)
}

/// Dynamical type of an isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// An element of `PSL₂(R)`, stored with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MoebiusMap {
    /// Rescales to unit determinant. Orientation-reversing or singular
    /// matrices are rejected.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}"
            )));
        }
        let s = det.sqrt().recip();
        Ok(Self { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// `z ↦ e^{w} z`: translation by `w` along `(0, ∞)` towards `∞`.
    pub fn dilation(w: f64) -> Self {
        Self { a: (0.5 * w).exp(), b: 0.0, c: 0.0, d: (-0.5 * w).exp() }
    }

    pub fn translation(t: f64) -> Self {
        Self { a: 1.0, b: t, c: 0.0, d: 1.0 }
    }

    /// Elliptic map fixing `i` whose derivative there is `e^{2iθ}`.
    pub fn rotation_about_i(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    /// The affine map `z ↦ (z − x)/y` sending `p` to `i`.
    pub fn to_i(p: &HPoint) -> Self {
        let r = p.y.sqrt();
        Self { a: 1.0 / r, b: -p.x / r, c: 0.0, d: r }
    }

    /// The map sending `p1, p2, p3` to `0, 1, ∞`.
    fn to_standard(p1: &BoundaryPoint, p2: &BoundaryPoint, p3: &BoundaryPoint) -> Result<Self> {
        let k1 = cross(p2, p3);
        let k3 = cross(p2, p1);
        let (x1, y1) = p1.pair();
        let (x3, y3) = p3.pair();
        Self::new(k1 * y1, -k1 * x1, k3 * y3, -k3 * x3).map_err(|_| {
            Error::InvalidParameter("three points must be distinct and counterclockwise".into())
        })
    }

    /// The unique orientation-preserving map with `src[k] ↦ dst[k]`.
    pub fn from_three_points(src: [BoundaryPoint; 3], dst: [BoundaryPoint; 3]) -> Result<Self> {
        let s = Self::to_standard(&src[0], &src[1], &src[2])?;
        let t = Self::to_standard(&dst[0], &dst[1], &dst[2])?;
        Ok(t.inverse().compose(&s))
    }

    /// Hyperbolic translation of length `w ≥ 0` whose axis runs from
    /// `repelling` to `attracting`.
    pub fn translation_along(
        repelling: &BoundaryPoint,
        attracting: &BoundaryPoint,
        w: f64,
    ) -> Result<Self> {
        // conjugate of diag(e^{w/2}, e^{-w/2}) by the matrix with columns
        // (attracting, repelling), expanded so the trace is exactly 2cosh(w/2)
        let (qx, qy) = attracting.pair();
        let (px, py) = repelling.pair();
        let det = qx * py - px * qy;
        if det.abs() <= 1e-15 {
            return Err(Error::InvalidParameter("geodesic endpoints coincide".into()));
        }
        let (sh, ch) = ((0.5 * w).sinh(), (0.5 * w).cosh());
        let sigma = (qx * py + px * qy) / det;
        Ok(Self {
            a: ch + sh * sigma,
            b: -2.0 * sh * qx * px / det,
            c: 2.0 * sh * qy * py / det,
            d: ch - sh * sigma,
        })
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        // keep the determinant pinned at 1 under long products
        let det = m.a * m.d - m.b * m.c;
        let s = det.sqrt().recip();
        Self { a: m.a * s, b: m.b * s, c: m.c * s, d: m.d * s }
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn apply(&self, p: &HPoint) -> HPoint {
        HPoint::from_complex(self.apply_complex(p.as_complex()))
    }

    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        let (x, y) = p.pair();
        BoundaryPoint::new(self.a * x + self.b * y, self.c * x + self.d * y)
            .expect("invertible map keeps pairs nonzero")
    }

    pub fn apply_geodesic(&self, g: &Geodesic) -> Geodesic {
        Geodesic { p: self.apply_boundary(&g.p), q: self.apply_boundary(&g.q) }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn kind(&self) -> MapKind {
        let t = self.trace().abs();
        let scale = 1.0 + self.a.abs() + self.b.abs() + self.c.abs() + self.d.abs();
        let tiny = 1e-12 * scale;
        if self.b.abs() <= tiny && self.c.abs() <= tiny && (self.a - self.d).abs() <= tiny {
            MapKind::Identity
        } else if t > 2.0 + 1e-12 {
            MapKind::Hyperbolic
        } else if t >= 2.0 - 1e-12 {
            MapKind::Parabolic
        } else {
            MapKind::Elliptic
        }
    }

    /// Translation length and dynamical type.
    pub fn translation_length(&self) -> (f64, MapKind) {
        let kind = self.kind();
        let len = match kind {
            MapKind::Hyperbolic => 2.0 * (0.5 * self.trace().abs()).acosh(),
            _ => 0.0,
        };
        (len, kind)
    }

    /// Fixed points of a hyperbolic map as `(repelling, attracting)`.
    pub fn axis(&self) -> Result<(BoundaryPoint, BoundaryPoint)> {
        let kind = self.kind();
        if kind != MapKind::Hyperbolic {
            return Err(Error::Classification(kind));
        }
        let tr = self.trace();
        let disc = (tr * tr - 4.0).sqrt();
        let big = 0.5 * (tr + tr.signum() * disc);
        let small = 1.0 / big;
        Ok((self.eigenvector(small), self.eigenvector(big)))
    }

    fn eigenvector(&self, lambda: f64) -> BoundaryPoint {
        let v1 = (self.b, lambda - self.a);
        let v2 = (lambda - self.d, self.c);
        let v = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
        BoundaryPoint::new(v.0, v.1).expect("non-identity map has a nonzero eigenvector")
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |s: f64| {
            (self.a - s * other.a).abs() <= tol
                && (self.b - s * other.b).abs() <= tol
                && (self.c - s * other.c).abs() <= tol
                && (self.d - s * other.d).abs() <= tol
        };
        close(1.0) || close(-1.0)
    }
}

/// Orientation-preserving map with `0 ↦ p`, `∞ ↦ q`, and `1` sent to the
/// midpoint of the counterclockwise arc from `p` to `q`.
pub(crate) fn frame_between(p: &BoundaryPoint, q: &BoundaryPoint) -> Result<MoebiusMap> {
    let (pp, pq) = (p.param(), q.param());
    let gap = ccw_gap(pp, pq);
    if gap == 0.0 || p.approx_eq(q, 1e-15) {
        return Err(Error::InvalidParameter("geodesic endpoints coincide".into()));
    }
    let mid = BoundaryPoint::from_param(pp + 0.5 * gap);
    MoebiusMap::from_three_points(
        [BoundaryPoint::from_real(0.0), BoundaryPoint::from_real(1.0), BoundaryPoint::infinity()],
        [*p, mid, *q],
    )
}

/// Which side of a geodesic a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Side of the counterclockwise arc from `p` to `q`.
    Ccw,
    /// Side of the counterclockwise arc from `q` to `p`.
    Cw,
    On,
}

/// A complete geodesic, identified by its unordered pair of endpoints.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Geodesic {
    p: BoundaryPoint,
    q: BoundaryPoint,
}

impl Geodesic {
    pub fn new(p: BoundaryPoint, q: BoundaryPoint) -> Result<Self> {
        if p.approx_eq(&q, GEOM_TOL) {
            return Err(Error::InvalidParameter(format!("geodesic endpoints {p} and {q} coincide")));
        }
        Ok(Self { p, q })
    }

    pub fn from_reals(p: f64, q: f64) -> Result<Self> {
        Self::new(BoundaryPoint::from_real(p), BoundaryPoint::from_real(q))
    }

    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.p, self.q)
    }

    pub fn approx_eq(&self, other: &Geodesic, tol: f64) -> bool {
        (self.p.approx_eq(&other.p, tol) && self.q.approx_eq(&other.q, tol))
            || (self.p.approx_eq(&other.q, tol) && self.q.approx_eq(&other.p, tol))
    }

    pub fn shares_endpoint(&self, other: &Geodesic, tol: f64) -> bool {
        [self.p, self.q]
            .iter()
            .any(|a| a.approx_eq(&other.p, tol) || a.approx_eq(&other.q, tol))
    }

    /// Map sending `(0, ∞)` to this geodesic with `0 ↦ p`, `∞ ↦ q`.
    pub fn frame(&self) -> MoebiusMap {
        frame_between(&self.p, &self.q).expect("validated endpoints")
    }

    /// Endpoints strictly interleave: the geodesics meet in a single interior point.
    pub fn crosses(&self, other: &Geodesic) -> bool {
        if self.shares_endpoint(other, GEOM_TOL) {
            return false;
        }
        let p0 = self.p.param();
        let arc = ccw_gap(p0, self.q.param());
        let a = ccw_gap(p0, other.p.param()) < arc;
        let b = ccw_gap(p0, other.q.param()) < arc;
        a != b
    }

    pub fn side_of(&self, z: &HPoint) -> Side {
        let w = self.frame().inverse().apply(z);
        let t = w.x / w.y;
        if t.abs() <= GEOM_TOL {
            Side::On
        } else if w.x > 0.0 {
            Side::Ccw
        } else {
            Side::Cw
        }
    }

    /// Side of a boundary point; endpoints of the geodesic are `On`.
    pub fn side_of_boundary(&self, x: &BoundaryPoint) -> Side {
        if x.approx_eq(&self.p, GEOM_TOL) || x.approx_eq(&self.q, GEOM_TOL) {
            return Side::On;
        }
        let p0 = self.p.param();
        if ccw_gap(p0, x.param()) < ccw_gap(p0, self.q.param()) {
            Side::Ccw
        } else {
            Side::Cw
        }
    }

    /// Point at signed distance `s` from the frame's base point `frame(i)`.
    pub fn point_at(&self, s: f64) -> HPoint {
        self.frame().apply(&HPoint { x: 0.0, y: s.exp() })
    }

    /// Nearest point of the geodesic to `z`.
    pub fn project(&self, z: &HPoint) -> HPoint {
        let f = self.frame();
        let w = f.inverse().apply(z).as_complex();
        f.apply(&HPoint { x: 0.0, y: w.norm() })
    }

    pub fn distance_to_point(&self, z: &HPoint) -> f64 {
        let w = self.frame().inverse().apply(z);
        (w.x.abs() / w.y).asinh()
    }
}

/// A closed geodesic segment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicArc {
    pub start: HPoint,
    pub end: HPoint,
}

impl GeodesicArc {
    pub fn new(start: HPoint, end: HPoint) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        hyp_distance(&self.start, &self.end)
    }

    /// An isometry `γ` with `γ(start) = i` and `γ(end) = i·e^{length}`.
    pub fn normalizer(&self) -> MoebiusMap {
        let to_i = MoebiusMap::to_i(&self.start);
        let z = to_i.apply_complex(self.end.as_complex());
        let w = (z - I) / (z + I);
        if w.norm() == 0.0 {
            return to_i;
        }
        MoebiusMap::rotation_about_i(-0.5 * w.arg()).compose(&to_i)
    }

    /// The complete geodesic containing the arc, oriented start → end.
    pub fn extension(&self) -> Result<Geodesic> {
        if self.length() == 0.0 {
            return Err(Error::InvalidParameter("zero-length arc has no extension".into()));
        }
        let inv = self.normalizer().inverse();
        Geodesic::new(
            inv.apply_boundary(&BoundaryPoint::from_real(0.0)),
            inv.apply_boundary(&BoundaryPoint::infinity()),
        )
    }

    /// Hyperbolic distance from `z` to the closed segment.
    pub fn distance_to_point(&self, z: &HPoint) -> f64 {
        let len = self.length();
        let n = self.normalizer();
        let w = n.apply(z);
        let r = w.as_complex().norm();
        if r >= 1.0 && r.ln() <= len {
            (w.x.abs() / w.y).asinh()
        } else {
            hyp_distance(z, &self.start).min(hyp_distance(z, &self.end))
        }
    }

    /// Continue the segment beyond `end` by `extra`.
    pub fn extend_end(&self, extra: f64) -> GeodesicArc {
        if extra <= 0.0 {
            return *self;
        }
        let len = self.length();
        let inv = self.normalizer().inverse();
        GeodesicArc { start: self.start, end: inv.apply(&HPoint { x: 0.0, y: (len + extra).exp() }) }
    }

    pub fn reversed(&self) -> GeodesicArc {
        GeodesicArc { start: self.end, end: self.start }
    }
}

/// A box `[a, b] × [c, d]` of geodesics with corners in counterclockwise order.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicBox {
    pub a: BoundaryPoint,
    pub b: BoundaryPoint,
    pub c: BoundaryPoint,
    pub d: BoundaryPoint,
}

impl GeodesicBox {
    pub fn new(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, d: BoundaryPoint) -> Result<Self> {
        let corners = [a, b, c, d];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if corners[i].approx_eq(&corners[j], GEOM_TOL) {
                    return Err(Error::InvalidBox(format!("corners {i} and {j} coincide")));
                }
            }
        }
        if !(is_ccw(&a, &b, &c) && is_ccw(&b, &c, &d) && is_ccw(&c, &d, &a)) {
            return Err(Error::InvalidBox("corners are not in counterclockwise order".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(
            BoundaryPoint::from_real(a),
            BoundaryPoint::from_real(b),
            BoundaryPoint::from_real(c),
            BoundaryPoint::from_real(d),
        )
    }

    /// The reference box `[0, 1] × [e/(e−1), ∞]` of Liouville measure 1.
    pub fn reference() -> Self {
        let e = std::f64::consts::E;
        Self::from_reals(0.0, 1.0, e / (e - 1.0), f64::INFINITY).expect("valid reference box")
    }

    pub fn corners(&self) -> [BoundaryPoint; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn map(&self, g: &MoebiusMap) -> Self {
        Self {
            a: g.apply_boundary(&self.a),
            b: g.apply_boundary(&self.b),
            c: g.apply_boundary(&self.c),
            d: g.apply_boundary(&self.d),
        }
    }

    /// For a geodesic with one endpoint in `[a, b]` and the other in
    /// `[c, d]`, the fractional positions of those endpoints along the two
    /// sides (circular parameter); `None` otherwise.
    pub fn locate(&self, g: &Geodesic) -> Option<(f64, f64)> {
        let (p, q) = g.endpoints();
        let first = |x: &BoundaryPoint| arc_fraction(&self.a, &self.b, x);
        let second = |x: &BoundaryPoint| arc_fraction(&self.c, &self.d, x);
        match (first(&p), second(&q)) {
            (Some(s), Some(t)) => Some((s, t)),
            _ => match (first(&q), second(&p)) {
                (Some(s), Some(t)) => Some((s, t)),
                _ => None,
            },
        }
    }
}

/// Position of `x` along the closed counterclockwise arc `[from, to]` as a
/// fraction in `[0, 1]`.
pub fn arc_fraction(from: &BoundaryPoint, to: &BoundaryPoint, x: &BoundaryPoint) -> Option<f64> {
    let span = ccw_gap(from.param(), to.param());
    if x.approx_eq(from, 0.0) {
        return Some(0.0);
    }
    let pos = ccw_gap(from.param(), x.param());
    (pos <= span).then(|| pos / span)
}

/// Liouville measure `log((c−a)(d−b) / ((d−a)(c−b)))` of a box, with
/// infinite corners cancelled algebraically.
pub fn liouville_measure(q: &GeodesicBox) -> f64 {
    let num = cross(&q.c, &q.a) * cross(&q.d, &q.b);
    let den = cross(&q.d, &q.a) * cross(&q.c, &q.b);
    (num / den).ln()
}

/// The isometry sending `q` onto `target`, both of Liouville measure 1.
pub fn moebius_from_box(q: &GeodesicBox, target: &GeodesicBox) -> Result<MoebiusMap> {
    moebius_from_box_with_tol(q, target, BOX_TOL)
}

pub fn moebius_from_box_with_tol(q: &GeodesicBox, target: &GeodesicBox, tol: f64) -> Result<MoebiusMap> {
    for b in [q, target] {
        let l = liouville_measure(b);
        if !((l - 1.0).abs() <= tol) {
            return Err(Error::BoxNormalization { observed: l });
        }
    }
    let g = MoebiusMap::from_three_points([q.a, q.b, q.c], [target.a, target.b, target.c])?;
    let mismatch = g.apply_boundary(&q.d).projective_distance(&target.d);
    if mismatch > 1e3 * tol.max(GEOM_TOL) {
        return Err(Error::BoxInconsistency { mismatch });
    }
    Ok(g)
}

pub fn translation_length(g: &MoebiusMap) -> (f64, MapKind) {
    g.translation_length()
}
