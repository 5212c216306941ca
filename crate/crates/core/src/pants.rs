//! Representations of the pair-of-pants group `⟨α, β, γ | αβγ = 1⟩` with
//! prescribed boundary lengths, their normal forms and classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Boundary, Error, Result};
use crate::moebius::{frame_to, BoundaryPoint, MoebiusTransform};
use crate::univcover::euler_class_pants;

/// `|ν − 1|` below which a pants rep sits on the degenerate locus.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Tolerance for commuting generators.
pub const COMMUTE_TOL: f64 = 1e-9;

/// Tolerance (circle angle units) for a shared boundary fixed point.
pub const SHARED_POINT_TOL: f64 = 1e-8;

const BRANCH_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsRep {
    pub alpha: MoebiusTransform,
    pub beta: MoebiusTransform,
}

impl PantsRep {
    pub fn new(alpha: MoebiusTransform, beta: MoebiusTransform) -> Self {
        PantsRep { alpha, beta }
    }

    /// `γ = (αβ)⁻¹`.
    pub fn gamma(&self) -> MoebiusTransform {
        self.alpha.compose(&self.beta).inverse()
    }

    /// The three boundary images `α, β, γ`.
    pub fn boundary(&self) -> [MoebiusTransform; 3] {
        [self.alpha, self.beta, self.gamma()]
    }

    pub fn conjugate(&self, h: &MoebiusTransform) -> PantsRep {
        PantsRep { alpha: self.alpha.conjugate_by(h), beta: self.beta.conjugate_by(h) }
    }

    pub fn conjugate_mat(&self, h: &crate::moebius::Mat2) -> PantsRep {
        PantsRep { alpha: h.conjugate(&self.alpha), beta: h.conjugate(&self.beta) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLengths {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BoundaryLengths {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for v in [a, b, c] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveLength(v));
            }
        }
        Ok(BoundaryLengths { a, b, c })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn max_diff(&self, other: &BoundaryLengths) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs()).max((self.c - other.c).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Generic,
    Upper,
    Lower,
    Diagonal,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Generic => "generic",
            Branch::Upper => "upper",
            Branch::Lower => "lower",
            Branch::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "generic" => Ok(Branch::Generic),
            "upper" => Ok(Branch::Upper),
            "lower" => Ok(Branch::Lower),
            "diagonal" => Ok(Branch::Diagonal),
            _ => Err(Error::InvalidBranch(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PantsClass {
    Geometric,
    NongeometricNonabelianA,
    NongeometricNonabelianB,
    Abelian,
    NongeometricGeneric,
}

impl fmt::Display for PantsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PantsClass::Geometric => "Geometric",
            PantsClass::NongeometricNonabelianA => "NongeometricNonabelianA",
            PantsClass::NongeometricNonabelianB => "NongeometricNonabelianB",
            PantsClass::Abelian => "Abelian",
            PantsClass::NongeometricGeneric => "NongeometricGeneric",
        })
    }
}

/// Normal form with `α = diag(A, 1/A)` and `β = [[B + x, y], [z, 1/B − x]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsNormalForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub epsilon: i8,
    pub x: f64,
    pub nu: f64,
    pub branch: Branch,
}

impl PantsNormalForm {
    /// Agreement of `A, B, C` within `tol` and of the sign and branch exactly.
    pub fn approx_eq(&self, other: &PantsNormalForm, tol: f64) -> bool {
        self.epsilon == other.epsilon
            && self.branch == other.branch
            && (self.a - other.a).abs() < tol
            && (self.b - other.b).abs() < tol
            && (self.c - other.c).abs() < tol
    }

    pub fn is_degenerate(&self) -> bool {
        (self.nu - 1.0).abs() < DEGENERATE_TOL
    }
}

/// `x` and `ν` from the exponentiated half-lengths and the sign.
fn solve_x(a: f64, b: f64, c: f64, epsilon: i8) -> (f64, f64) {
    let eps = epsilon as f64;
    let x = (eps * (c + 1.0 / c) - a * b - 1.0 / (a * b)) / (a - 1.0 / a);
    let nu = (b + x) * (1.0 / b - x);
    (x, nu)
}

/// The product whose vanishing detects the degenerate locus for sign `ε`.
pub fn degenerate_factor(lengths: &BoundaryLengths, epsilon: i8) -> f64 {
    let (a, b, c) = half_exp(lengths);
    let e = epsilon as f64;
    (b * c / a - e) * (a * c / b - e) * (a * b / c - e) * (a * b * c - e)
}

fn half_exp(l: &BoundaryLengths) -> (f64, f64, f64) {
    ((l.a / 2.0).exp(), (l.b / 2.0).exp(), (l.c / 2.0).exp())
}

/// True when `ε = +1` and the representation with these lengths is reducible.
pub fn is_degenerate(lengths: &BoundaryLengths, epsilon: i8) -> bool {
    let (a, b, c) = half_exp(lengths);
    let (_, nu) = solve_x(a, b, c, epsilon);
    epsilon == 1 && (nu - 1.0).abs() < DEGENERATE_TOL
}

pub fn build_pants_rep(lengths: &BoundaryLengths, epsilon: i8, branch: Branch) -> Result<PantsRep> {
    let lengths = BoundaryLengths::new(lengths.a, lengths.b, lengths.c)?;
    if epsilon != 1 && epsilon != -1 {
        return Err(Error::BadParameter(format!("epsilon must be ±1, got {epsilon}")));
    }
    let (a, b, c) = half_exp(&lengths);
    let (x, nu) = solve_x(a, b, c, epsilon);
    let degenerate = epsilon == 1 && (nu - 1.0).abs() < DEGENERATE_TOL;
    let (y, z) = match (branch, degenerate) {
        (Branch::Generic, false) => (nu - 1.0, 1.0),
        (Branch::Generic, true) => {
            return Err(Error::InvalidBranch(format!(
                "generic branch requested on the degenerate locus (nu = {nu})"
            )))
        }
        (_, false) => {
            return Err(Error::InvalidBranch(format!("{branch} branch requested off the degenerate locus")))
        }
        (Branch::Upper, true) => (1.0, 0.0),
        (Branch::Lower, true) => (0.0, 1.0),
        (Branch::Diagonal, true) => (0.0, 0.0),
    };
    let alpha = MoebiusTransform::new(a, 0.0, 0.0, 1.0 / a)?;
    let beta = MoebiusTransform::new(b + x, y, z, 1.0 / b - x)?;
    Ok(PantsRep { alpha, beta })
}

pub fn boundary_lengths(rep: &PantsRep) -> Result<BoundaryLengths> {
    let names = [Boundary::Alpha, Boundary::Beta, Boundary::Gamma];
    let mut out = [0.0; 3];
    for ((g, name), slot) in rep.boundary().iter().zip(names).zip(out.iter_mut()) {
        if !g.is_hyperbolic() {
            return Err(Error::BoundaryNotHyperbolic(name));
        }
        *slot = g.translation_length();
    }
    Ok(BoundaryLengths { a: out[0], b: out[1], c: out[2] })
}

/// Conjugator taking the repelling and attracting fixed points of `α` to
/// `0` and `∞`.
fn alpha_frame(rep: &PantsRep) -> Result<MoebiusTransform> {
    let (attr, rep_pt) = rep.alpha.fixed_points().map_err(|_| Error::BoundaryNotHyperbolic(Boundary::Alpha))?;
    Ok(frame_to(rep_pt, attr).inverse())
}

pub fn normal_form(rep: &PantsRep) -> Result<PantsNormalForm> {
    let lengths = boundary_lengths(rep)?;
    let h = alpha_frame(rep)?;
    let conj = rep.conjugate(&h);
    let [a11, _, _, a22] = conj.alpha.entries();
    let a = a11.max(a22);
    let [b11, y, z, _] = conj.beta.entries();
    let b = (lengths.b / 2.0).exp();
    let c = (lengths.c / 2.0).exp();
    let product = conj.alpha.as_mat2() * conj.beta.as_mat2();
    let epsilon: i8 = if product.trace() > 0.0 { 1 } else { -1 };
    let x = b11 - b;
    let nu = (b + x) * (1.0 / b - x);
    let branch = if (nu - 1.0).abs() >= DEGENERATE_TOL || epsilon == -1 {
        Branch::Generic
    } else if y.abs() < BRANCH_ZERO_TOL && z.abs() < BRANCH_ZERO_TOL {
        Branch::Diagonal
    } else if z.abs() > y.abs() {
        Branch::Lower
    } else {
        Branch::Upper
    };
    Ok(PantsNormalForm { a, b, c, epsilon, x, nu, branch })
}

/// The normal-form representative itself (α diagonal, β scaled to the branch
/// canonical off-diagonal entries).
pub fn normal_form_rep(rep: &PantsRep) -> Result<PantsRep> {
    let h = alpha_frame(rep)?;
    let conj = rep.conjugate(&h);
    let [_, y, z, _] = conj.beta.entries();
    let scale = if z.abs() > BRANCH_ZERO_TOL {
        z
    } else if y.abs() > BRANCH_ZERO_TOL {
        1.0 / y
    } else {
        1.0
    };
    // Conjugating by diag(s, 1) sends (y, z) to (s·y, z/s).
    let d = crate::moebius::Mat2::new(scale, 0.0, 0.0, 1.0).unimodular();
    Ok(conj.conjugate_mat(&d))
}

fn commute(g: &MoebiusTransform, h: &MoebiusTransform) -> bool {
    g.compose(h).max_entry_diff(&h.compose(g)) < COMMUTE_TOL
}

/// A boundary fixed point shared by `α` and `β`, and whether it is the
/// attracting point of `α`.
fn shared_fixed_point(rep: &PantsRep) -> Option<(BoundaryPoint, bool)> {
    let (a_attr, a_rep) = rep.alpha.fixed_points().ok()?;
    let (b_attr, b_rep) = rep.beta.fixed_points().ok()?;
    let shared = |p: &BoundaryPoint| {
        p.circle_distance(&b_attr) < SHARED_POINT_TOL || p.circle_distance(&b_rep) < SHARED_POINT_TOL
    };
    if shared(&a_attr) {
        Some((a_attr, true))
    } else if shared(&a_rep) {
        Some((a_rep, false))
    } else {
        None
    }
}

pub fn classify_pants_rep(rep: &PantsRep) -> Result<PantsClass> {
    boundary_lengths(rep)?;
    let eu = euler_class_pants(rep)?;
    if eu != 0 {
        return Ok(PantsClass::Geometric);
    }
    if commute(&rep.alpha, &rep.beta) {
        return Ok(PantsClass::Abelian);
    }
    Ok(match shared_fixed_point(rep) {
        Some((_, true)) => PantsClass::NongeometricNonabelianA,
        Some((_, false)) => PantsClass::NongeometricNonabelianB,
        None => PantsClass::NongeometricGeneric,
    })
}

/// The `ε = +1` representation with the same boundary lengths.
pub fn fold_pants(rep: &PantsRep) -> Result<PantsRep> {
    if classify_pants_rep(rep)? != PantsClass::Geometric {
        return Err(Error::NotGeometric);
    }
    let lengths = boundary_lengths(rep)?;
    let branch = if is_degenerate(&lengths, 1) { Branch::Upper } else { Branch::Generic };
    build_pants_rep(&lengths, 1, branch)
}

/// The geometric (`ε = −1`) representation with the same boundary lengths.
pub fn unfold_pants(rep: &PantsRep) -> Result<PantsRep> {
    if classify_pants_rep(rep)? == PantsClass::Geometric {
        return Err(Error::AlreadyGeometric);
    }
    let lengths = boundary_lengths(rep)?;
    build_pants_rep(&lengths, -1, Branch::Generic)
}

/// Replaces each image of an elementary representation by its diagonal part
/// in a frame where the shared fixed point is `∞` and the other fixed point
/// of `α` is `0`.
pub fn abelianize(rep: &PantsRep) -> Result<PantsRep> {
    let (xi, xi_attracting) = shared_fixed_point(rep).ok_or(Error::NotElementary)?;
    let (a_attr, a_rep) = rep.alpha.fixed_points()?;
    let other = if xi_attracting { a_rep } else { a_attr };
    let g = frame_to(other, xi);
    let conj = rep.conjugate(&g.inverse());
    let diag = |m: &MoebiusTransform| {
        let [a, _, _, d] = m.entries();
        MoebiusTransform::new(a, 0.0, 0.0, d)
    };
    Ok(PantsRep { alpha: diag(&conj.alpha)?, beta: diag(&conj.beta)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::Mat2;
    use crate::univcover::euler_parity_pants;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn len(a: f64, b: f64, c: f64) -> BoundaryLengths {
        BoundaryLengths::new(a, b, c).unwrap()
    }

    fn random_conjugator(rng: &mut impl Rng) -> MoebiusTransform {
        loop {
            let (a, b, c) = (rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if let Ok(g) = MoebiusTransform::new(a, b, c, (1.0 + b * c) / a) {
                return g;
            }
        }
    }

    #[test]
    fn geometric_round_trip() {
        let rep = build_pants_rep(&len(2.0, 2.0, 2.0), -1, Branch::Generic).unwrap();
        assert!(boundary_lengths(&rep).unwrap().max_diff(&len(2.0, 2.0, 2.0)) < 1e-8);
        assert_eq!(euler_class_pants(&rep).unwrap().abs(), 1);
    }

    #[test]
    fn degenerate_factor_vanishes_on_sum() {
        let l = len(2.0, 1.0, 1.0);
        assert!(degenerate_factor(&l, 1).abs() < 1e-12);
        assert!(is_degenerate(&l, 1));
        assert!(!is_degenerate(&l, -1));
        assert!(degenerate_factor(&len(1.0, 1.0, 1.0), 1).abs() > 1e-3);
    }

    #[test]
    fn branch_validation() {
        assert!(matches!(
            build_pants_rep(&len(1.0, 1.0, 1.0), 1, Branch::Upper),
            Err(Error::InvalidBranch(_))
        ));
        assert!(matches!(
            build_pants_rep(&len(2.0, 1.0, 1.0), 1, Branch::Generic),
            Err(Error::InvalidBranch(_))
        ));
        assert!(matches!(build_pants_rep(&BoundaryLengths { a: 0.0, b: 1.0, c: 1.0 }, 1, Branch::Generic), Err(Error::NonPositiveLength(_))));
    }

    #[test]
    fn folded_generic_has_zero_euler_class() {
        let rep = build_pants_rep(&len(1.0, 1.0, 1.0), 1, Branch::Generic).unwrap();
        assert_eq!(euler_class_pants(&rep).unwrap(), 0);
        assert_eq!(classify_pants_rep(&rep).unwrap(), PantsClass::NongeometricGeneric);
    }

    #[test]
    fn classification_examples() {
        let geo = build_pants_rep(&len(1.0, 1.0, 1.0), -1, Branch::Generic).unwrap();
        assert_eq!(classify_pants_rep(&geo).unwrap(), PantsClass::Geometric);
        let l = len(2.0, 1.0, 1.0);
        let cases = [
            (Branch::Upper, PantsClass::NongeometricNonabelianA),
            (Branch::Lower, PantsClass::NongeometricNonabelianB),
            (Branch::Diagonal, PantsClass::Abelian),
        ];
        for (branch, class) in cases {
            let rep = build_pants_rep(&l, 1, branch).unwrap();
            assert_eq!(classify_pants_rep(&rep).unwrap(), class, "{branch}");
            assert!(boundary_lengths(&rep).unwrap().max_diff(&l) < 1e-8);
        }
    }

    #[test]
    fn boundary_not_hyperbolic_names_gamma() {
        // α β = parabolic: α = diag(2, 1/2), β chosen so αβ = [[1,1],[0,1]].
        let alpha = MoebiusTransform::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let beta = alpha.inverse().compose(&MoebiusTransform::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let rep = PantsRep::new(alpha, beta);
        assert!(matches!(boundary_lengths(&rep), Err(Error::BoundaryNotHyperbolic(Boundary::Gamma))));
    }

    #[test]
    fn normal_form_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let l = len(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0));
            for eps in [-1, 1] {
                let rep = build_pants_rep(&l, eps, Branch::Generic).unwrap();
                let nf = normal_form(&rep).unwrap();
                assert_eq!(nf.epsilon, eps);
                let h = random_conjugator(&mut rng);
                let nf2 = normal_form(&rep.conjugate(&h)).unwrap();
                assert!(nf.approx_eq(&nf2, 1e-8), "{nf:?} vs {nf2:?}");
                // Orientation-reversing conjugation keeps the PGL class.
                let nf3 = normal_form(&rep.conjugate_mat(&Mat2::FLIP)).unwrap();
                assert!(nf.approx_eq(&nf3, 1e-8));
            }
        }
    }

    #[test]
    fn normal_form_distinguishes_degenerate_branches_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let l = len(0.7, 1.3, 2.0);
        for branch in [Branch::Upper, Branch::Lower, Branch::Diagonal] {
            let rep = build_pants_rep(&l, 1, branch).unwrap();
            let h = random_conjugator(&mut rng);
            assert_eq!(normal_form(&rep.conjugate(&h)).unwrap().branch, branch);
        }
    }

    #[test]
    fn already_normal_input_is_unchanged() {
        let rep = build_pants_rep(&len(1.0, 2.0, 2.5), -1, Branch::Generic).unwrap();
        let again = normal_form_rep(&rep).unwrap();
        assert!(again.alpha.approx_eq(&rep.alpha, 1e-12));
        assert!(again.beta.approx_eq(&rep.beta, 1e-12));
    }

    #[test]
    fn fold_and_unfold() {
        let l = len(1.0, 2.0, 2.5);
        let geo = build_pants_rep(&l, -1, Branch::Generic).unwrap();
        let folded = fold_pants(&geo).unwrap();
        assert_eq!(euler_class_pants(&folded).unwrap(), 0);
        assert!(boundary_lengths(&folded).unwrap().max_diff(&l) < 1e-9);
        assert!(matches!(fold_pants(&folded), Err(Error::NotGeometric)));
        let back = unfold_pants(&folded).unwrap();
        assert_eq!(classify_pants_rep(&back).unwrap(), PantsClass::Geometric);
        assert!(normal_form(&back).unwrap().approx_eq(&normal_form(&geo).unwrap(), 1e-8));
        assert!(matches!(unfold_pants(&geo), Err(Error::AlreadyGeometric)));

        let abelian = build_pants_rep(&len(2.0, 1.0, 1.0), 1, Branch::Diagonal).unwrap();
        let unfolded = unfold_pants(&abelian).unwrap();
        assert_eq!(euler_class_pants(&unfolded).unwrap().abs(), 1);
        assert!(boundary_lengths(&unfolded).unwrap().max_diff(&len(2.0, 1.0, 1.0)) < 1e-9);

        let degenerate_geo = build_pants_rep(&len(2.0, 1.0, 1.0), -1, Branch::Generic).unwrap();
        let degenerate_fold = fold_pants(&degenerate_geo).unwrap();
        assert_eq!(normal_form(&degenerate_fold).unwrap().branch, Branch::Upper);
    }

    #[test]
    fn abelianize_examples() {
        let diag = build_pants_rep(&len(2.0, 1.0, 1.0), 1, Branch::Diagonal).unwrap();
        assert_eq!(abelianize(&diag).unwrap(), diag);
        let target = normal_form(&diag).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for branch in [Branch::Upper, Branch::Lower] {
            let rep = build_pants_rep(&len(2.0, 1.0, 1.0), 1, branch).unwrap().conjugate(&random_conjugator(&mut rng));
            let ab = abelianize(&rep).unwrap();
            assert_eq!(classify_pants_rep(&ab).unwrap(), PantsClass::Abelian);
            assert!(normal_form(&ab).unwrap().approx_eq(&target, 1e-8));
        }
        let geo = build_pants_rep(&len(1.0, 1.0, 1.0), -1, Branch::Generic).unwrap();
        assert!(matches!(abelianize(&geo), Err(Error::NotElementary)));
    }

    #[test]
    fn parity_law_and_conjugation_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let l = len(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0));
            let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
            let rep = build_pants_rep(&l, eps, Branch::Generic).unwrap();
            let eu = euler_class_pants(&rep).unwrap();
            assert_eq!(eps, if eu.rem_euclid(2) == 0 { 1 } else { -1 });
            assert_eq!(euler_parity_pants(&rep).unwrap() as i64, eu.rem_euclid(2));
            let h = random_conjugator(&mut rng);
            assert_eq!(euler_class_pants(&rep.conjugate(&h)).unwrap(), eu);
            assert_eq!(euler_class_pants(&rep.conjugate_mat(&Mat2::new(1.0, 0.0, 0.0, -1.0))).unwrap(), -eu);
        }
    }

    #[test]
    fn folded_generic_reps_are_nonabelian() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..100 {
            let l = len(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0));
            if is_degenerate(&l, 1) {
                continue;
            }
            let rep = build_pants_rep(&l, 1, Branch::Generic).unwrap();
            let comm = rep.alpha * rep.beta * rep.alpha.inverse() * rep.beta.inverse();
            assert!(comm.distance_from_identity() >= 1e-6);
        }
    }
}
