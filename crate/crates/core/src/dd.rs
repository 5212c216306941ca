//! Double-double arithmetic for long chains of matrix products whose result
//! is rounded once to `f64`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::moebius::{Mat2, MoebiusTransform};

/// An unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(self.hi.max(0.0).sqrt());
        }
        // One Newton step from the f64 root.
        let x = self.hi.sqrt();
        let xx = Dd::new(x) * Dd::new(x);
        let (hi, lo) = quick_two_sum(x, (self - xx).to_f64() / (2.0 * x));
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self - other * Dd::new(q1);
        let q2 = r.hi / other.hi;
        let r = r - other * Dd::new(q2);
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }
}

/// A 2×2 matrix over double-doubles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdMat {
    pub a: Dd,
    pub b: Dd,
    pub c: Dd,
    pub d: Dd,
}

impl DdMat {
    pub const IDENTITY: DdMat = DdMat { a: Dd::ONE, b: Dd::ZERO, c: Dd::ZERO, d: Dd::ONE };

    pub fn det(&self) -> Dd {
        self.a * self.d - self.b * self.c
    }

    /// The adjugate, which is the inverse up to the determinant.
    pub fn adjugate(&self) -> DdMat {
        DdMat { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Rescales to determinant `±1`. Products of rescaled factors keep unit
    /// determinant to working precision, whereas the determinant of a product
    /// with large entries is lost to cancellation.
    pub fn unimodular(&self) -> DdMat {
        let det = self.det();
        let s = if det.hi < 0.0 { (-det).sqrt() } else { det.sqrt() };
        DdMat { a: self.a.div(s), b: self.b.div(s), c: self.c.div(s), d: self.d.div(s) }
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2::new(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }

    /// Translation length `2 acosh(|tr| / 2)` of a unit-determinant matrix,
    /// accurate near the parabolic limit. Zero when elliptic.
    pub fn translation_length(&self) -> f64 {
        let tr = self.a + self.d;
        let half = Dd::new(0.5) * if tr.hi < 0.0 { -tr } else { tr };
        let u = (half - Dd::ONE).to_f64();
        if u <= 0.0 {
            return 0.0;
        }
        2.0 * (u + (u * (2.0 + u)).sqrt()).ln_1p()
    }

    /// Rounds an orientation-preserving product to a Möbius transformation.
    pub fn to_moebius(&self) -> MoebiusTransform {
        MoebiusTransform::from_mat2(&self.to_mat2())
    }
}

impl From<Mat2> for DdMat {
    fn from(m: Mat2) -> DdMat {
        DdMat { a: Dd::new(m.a), b: Dd::new(m.b), c: Dd::new(m.c), d: Dd::new(m.d) }
    }
}

/// Rescaled to unit determinant in double-double.
impl From<MoebiusTransform> for DdMat {
    fn from(g: MoebiusTransform) -> DdMat {
        DdMat::from(g.as_mat2()).unimodular()
    }
}

impl Mul for DdMat {
    type Output = DdMat;
    fn mul(self, o: DdMat) -> DdMat {
        DdMat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}
