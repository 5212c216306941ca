//! PSL(2,R) acting on the upper half-plane.
//!
//! Elements are stored as unit-determinant real matrices in a canonical sign
//! (trace nonnegative, ties broken by the first nonzero entry of `a, b, c`),
//! so two matrices describing the same isometry compare equal entrywise.
//! The boundary circle is the real line together with a tagged point at
//! infinity.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Band around `|trace| = 2` that snaps to the parabolic class.
pub const PARABOLIC_TOL: f64 = 1e-9;

const SIGN_TIE_TOL: f64 = 1e-12;

/// Determinant drift tolerated before rescaling, so exact products stay exact.
const DET_DRIFT_TOL: f64 = 1e-13;

/// A real 2×2 matrix with determinant ±1, viewed as an isometry of the
/// hyperbolic plane: `z ↦ (az+b)/(cz+d)` when the determinant is positive and
/// `z ↦ (a z̄ + b)/(c z̄ + d)` when it is negative.
///
/// This is the working type for orientation-reversing frames; everything that
/// ends up in a representation is a [`MoebiusTransform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Reflection `z ↦ -z̄` across the imaginary axis.
    pub const FLIP: Mat2 = Mat2 { a: -1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a matrix with determinant ±1 (up to the scalar, which acts
    /// trivially).
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    /// Rescales to `|det| = 1`.
    pub fn unimodular(&self) -> Mat2 {
        let s = self.det().abs().sqrt();
        Mat2::new(self.a / s, self.b / s, self.c / s, self.d / s)
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.det() > 0.0
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// `self · g · self⁻¹`, which always lands back in PSL(2,R).
    pub fn conjugate(&self, g: &MoebiusTransform) -> MoebiusTransform {
        let m = *self * g.as_mat2() * self.inverse();
        MoebiusTransform::from_mat2(&m)
    }

    pub fn to_moebius(&self) -> Result<MoebiusTransform> {
        MoebiusTransform::new(self.a, self.b, self.c, self.d)
    }

    pub fn apply(&self, p: HPoint) -> HPoint {
        let x = p.x;
        let y = if self.det() < 0.0 { -p.y } else { p.y };
        let den = (self.c * x + self.d).powi(2) + (self.c * y).powi(2);
        let re = ((self.a * x + self.b) * (self.c * x + self.d) + self.a * self.c * y * y) / den;
        let im = (self.a * self.d - self.b * self.c) * y / den;
        HPoint { x: re, y: im }
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// An element of PSL(2,R) in canonical sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusTransform {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::NotInUpperHalfPlane(y));
        }
        Ok(HPoint { x, y })
    }

    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };
}

/// A point of the boundary circle `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    /// Angle coordinate in `[0, 1)`: the direction `(cos πθ, sin πθ)` spans
    /// the line through `(x, 1)`, and `∞` sits at `θ = 0`.
    pub fn angle(&self) -> f64 {
        match *self {
            BoundaryPoint::Infinity => 0.0,
            BoundaryPoint::Finite(x) => {
                let t = 1.0f64.atan2(x) / std::f64::consts::PI;
                if t >= 1.0 {
                    0.0
                } else {
                    t
                }
            }
        }
    }

    /// Distance along the boundary circle in angle units (circumference 1).
    pub fn circle_distance(&self, other: &BoundaryPoint) -> f64 {
        let d = (self.angle() - other.angle()).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => f.write_str("∞"),
        }
    }
}

/// A complete geodesic, given by its two distinct endpoints. Equality ignores
/// the order of the endpoints.
#[derive(Debug, Clone, Copy)]
pub struct Geodesic {
    pub p: BoundaryPoint,
    pub q: BoundaryPoint,
}

impl Geodesic {
    pub fn new(p: BoundaryPoint, q: BoundaryPoint) -> Result<Self> {
        if p == q {
            return Err(Error::DegenerateGeodesic);
        }
        Ok(Geodesic { p, q })
    }

    /// True when the endpoint sets agree within `tol` in the angle coordinate.
    pub fn approx_eq(&self, other: &Geodesic, tol: f64) -> bool {
        let same = self.p.circle_distance(&other.p) < tol && self.q.circle_distance(&other.q) < tol;
        let swapped = self.p.circle_distance(&other.q) < tol && self.q.circle_distance(&other.p) < tol;
        same || swapped
    }

    /// An orientation-preserving isometry taking `0` to `p` and `∞` to `q`.
    pub fn frame(&self) -> MoebiusTransform {
        frame_to(self.p, self.q)
    }

    /// Hyperbolic distance from `pt` to this geodesic.
    pub fn distance_to(&self, pt: HPoint) -> f64 {
        let g = self.frame().inverse();
        let p = g.apply(pt);
        (p.x.abs() / p.y).asinh()
    }

    /// Reflection across the geodesic.
    pub fn reflection(&self) -> Mat2 {
        let g = self.frame().as_mat2();
        (g * Mat2::FLIP * g.inverse()).unimodular()
    }
}

impl PartialEq for Geodesic {
    fn eq(&self, other: &Self) -> bool {
        (self.p == other.p && self.q == other.q) || (self.p == other.q && self.q == other.p)
    }
}

/// An orientation-preserving isometry taking `0 ↦ p` and `∞ ↦ q`.
pub(crate) fn frame_to(p: BoundaryPoint, q: BoundaryPoint) -> MoebiusTransform {
    use BoundaryPoint::*;
    let m = match (p, q) {
        (Finite(p), Infinity) => Mat2::new(1.0, p, 0.0, 1.0),
        (Infinity, Finite(q)) => Mat2::new(q, -1.0, 1.0, 0.0),
        (Finite(p), Finite(q)) => {
            if q > p {
                Mat2::new(q, p, 1.0, 1.0)
            } else {
                Mat2::new(-q, p, -1.0, 1.0)
            }
        }
        (Infinity, Infinity) => Mat2::IDENTITY,
    };
    MoebiusTransform::from_mat2(&m)
}

impl MoebiusTransform {
    pub const IDENTITY: MoebiusTransform = MoebiusTransform { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds the element with matrix `[[a, b], [c, d]]`, rescaled to unit
    /// determinant and sign-normalized.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let det = a * d - b * c;
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant(det));
        }
        Ok(Self::normalized(a, b, c, d, det))
    }

    fn normalized(a: f64, b: f64, c: f64, d: f64, det: f64) -> Self {
        // With large entries the computed determinant is dominated by
        // cancellation error, so rescaling by it would only add noise.
        let noise = 8.0 * f64::EPSILON * (a * d).abs().max((b * c).abs());
        let (a, b, c, d) = if (det - 1.0).abs() > DET_DRIFT_TOL.max(noise) {
            let s = det.sqrt();
            (a / s, b / s, c / s, d / s)
        } else {
            (a, b, c, d)
        };
        let tr = a + d;
        let flip = if tr.abs() < SIGN_TIE_TOL {
            let lead = [a, b, c].into_iter().find(|x| x.abs() > SIGN_TIE_TOL).unwrap_or(d);
            lead < 0.0
        } else {
            tr < 0.0
        };
        if flip {
            MoebiusTransform { a: -a, b: -b, c: -c, d: -d }
        } else {
            MoebiusTransform { a, b, c, d }
        }
    }

    /// Used on products of unit-determinant matrices, where the determinant is
    /// positive up to rounding.
    pub(crate) fn from_mat2(m: &Mat2) -> Self {
        let det = m.det();
        let noise = 8.0 * f64::EPSILON * (m.a * m.d).abs().max((m.b * m.c).abs());
        debug_assert!(det > 0.0 || (det - 1.0).abs() <= noise, "orientation-reversing matrix {m:?}");
        Self::normalized(m.a, m.b, m.c, m.d, det)
    }

    pub fn diag(lambda: f64) -> Result<Self> {
        Self::new(lambda, 0.0, 0.0, 1.0 / lambda)
    }

    /// Translation by `length` along the imaginary axis, towards `∞`.
    pub fn translation(length: f64) -> Self {
        let e = (length / 2.0).exp();
        MoebiusTransform { a: e, b: 0.0, c: 0.0, d: 1.0 / e }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn as_mat2(&self) -> Mat2 {
        Mat2::new(self.a, self.b, self.c, self.d)
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn compose(&self, h: &MoebiusTransform) -> MoebiusTransform {
        let m = self.as_mat2() * h.as_mat2();
        Self::from_mat2(&m)
    }

    pub fn inverse(&self) -> MoebiusTransform {
        Self::normalized(self.d, -self.b, -self.c, self.a, 1.0)
    }

    /// `h · self · h⁻¹`.
    pub fn conjugate_by(&self, h: &MoebiusTransform) -> MoebiusTransform {
        h.compose(self).compose(&h.inverse())
    }

    pub fn pow(&self, n: i32) -> MoebiusTransform {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = MoebiusTransform::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// Largest entrywise deviation from the identity.
    pub fn distance_from_identity(&self) -> f64 {
        (self.a - 1.0).abs().max(self.b.abs()).max(self.c.abs()).max((self.d - 1.0).abs())
    }

    pub fn max_entry_diff(&self, other: &MoebiusTransform) -> f64 {
        let x = self.entries();
        let y = other.entries();
        (0..4).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &MoebiusTransform, tol: f64) -> bool {
        self.max_entry_diff(other) < tol
    }

    pub fn classify(&self) -> IsometryClass {
        let t = self.trace().abs();
        if (t - 2.0).abs() < PARABOLIC_TOL {
            if self.distance_from_identity() < PARABOLIC_TOL {
                IsometryClass::Identity
            } else {
                IsometryClass::Parabolic
            }
        } else if t > 2.0 {
            IsometryClass::Hyperbolic
        } else {
            IsometryClass::Elliptic
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.classify() == IsometryClass::Hyperbolic
    }

    /// `inf_x d(x, g·x)`: `2 arccosh(|tr|/2)` for hyperbolic elements, zero
    /// otherwise.
    pub fn translation_length(&self) -> f64 {
        if self.is_hyperbolic() {
            translation_length_from_trace(self.trace())
        } else {
            0.0
        }
    }

    /// Attracting and repelling fixed points of a hyperbolic element.
    pub fn fixed_points(&self) -> Result<(BoundaryPoint, BoundaryPoint)> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic);
        }
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let tr = a + d;
        if c == 0.0 {
            let finite = BoundaryPoint::Finite(b / (d - a));
            return Ok(if a.abs() > d.abs() {
                (BoundaryPoint::Infinity, finite)
            } else {
                (finite, BoundaryPoint::Infinity)
            });
        }
        // Roots of c z² + (d − a) z − b = 0; discriminant is tr² − 4.
        let disc = (tr * tr - 4.0).max(0.0).sqrt();
        let bq = d - a;
        let q = -0.5 * (bq + bq.signum_or_one() * disc);
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / c, -b / q) };
        // Fixed point z is attracting iff |cz + d| > 1 (positive trace).
        let attracting_first = (c * r1 + d).abs() > (c * r2 + d).abs();
        let (p1, p2) = (BoundaryPoint::Finite(r1), BoundaryPoint::Finite(r2));
        Ok(if attracting_first { (p1, p2) } else { (p2, p1) })
    }

    /// The translation axis, oriented from the repelling to the attracting
    /// fixed point.
    pub fn axis(&self) -> Result<Geodesic> {
        let (attr, rep) = self.fixed_points()?;
        Geodesic::new(rep, attr)
    }

    pub fn apply(&self, p: HPoint) -> HPoint {
        self.as_mat2().apply(p)
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        self.as_mat2().apply_boundary(p)
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

pub fn translation_length_from_trace(trace: f64) -> f64 {
    let t = trace.abs() / 2.0;
    if t <= 1.0 {
        0.0
    } else {
        2.0 * t.acosh()
    }
}

impl Mul for MoebiusTransform {
    type Output = MoebiusTransform;
    fn mul(self, rhs: MoebiusTransform) -> MoebiusTransform {
        self.compose(&rhs)
    }
}

impl fmt::Display for MoebiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn compose(g: &MoebiusTransform, h: &MoebiusTransform) -> MoebiusTransform {
    g.compose(h)
}

pub fn classify(g: &MoebiusTransform) -> IsometryClass {
    g.classify()
}

pub fn translation_length(g: &MoebiusTransform) -> f64 {
    g.translation_length()
}

pub fn axis(g: &MoebiusTransform) -> Result<Geodesic> {
    g.axis()
}

pub fn apply(g: &MoebiusTransform, p: HPoint) -> HPoint {
    g.apply(p)
}

/// Hyperbolic distance in the upper half-plane.
pub fn distance(p: HPoint, q: HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}
