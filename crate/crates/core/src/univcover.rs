//! The universal cover of PSL(2,R), realized as lifts of boundary circle
//! maps, and the Euler class of pants and surface representations.
//!
//! The boundary circle is parametrized by `θ ∈ R/Z` through the direction
//! `v(θ) = (cos πθ, sin πθ)`; the Moebius action is the projectivized linear
//! action on `v`. A lift is stored by its base and its value at `θ = 0`.

use std::f64::consts::PI;

use crate::dd::DdMat;
use crate::error::{Boundary, Error, Result};
use crate::moebius::MoebiusTransform;
use crate::pants::PantsRep;
use crate::words::Letter;

/// Distance to the nearest integer above which rounding an offset fails.
pub const ROUNDING_TOL: f64 = 0.1;

/// Entrywise tolerance for a lifted element to count as central.
pub const CENTRAL_TOL: f64 = 1e-8;

/// Relator residue accepted by the commutator Euler class.
pub const RELATOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedIsometry {
    pub base: MoebiusTransform,
    /// Value at `0` of the lifted circle map.
    pub offset: f64,
}

/// A deck translation `x ↦ x + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CentralElement {
    pub k: i64,
}

fn wrap_pi(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Angle (in `[0, 1)`) of the image of `θ = 0` under `g`.
fn base_offset(g: &MoebiusTransform) -> f64 {
    let [a, _, c, _] = g.entries();
    let t = (c.atan2(a) / PI).rem_euclid(1.0);
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

impl LiftedIsometry {
    pub const IDENTITY: LiftedIsometry = LiftedIsometry { base: MoebiusTransform::IDENTITY, offset: 0.0 };

    /// The lift of `g` whose value at `0` lies in `[0, 1)`.
    pub fn new(g: MoebiusTransform) -> Self {
        LiftedIsometry { base: g, offset: base_offset(&g) }
    }

    /// The deck translate of this lift by `k`.
    pub fn deck(&self, k: i64) -> Self {
        LiftedIsometry { base: self.base, offset: self.offset + k as f64 }
    }

    pub fn central(k: i64) -> Self {
        LiftedIsometry { base: MoebiusTransform::IDENTITY, offset: k as f64 }
    }

    /// Value of the lifted circle map at `x`.
    ///
    /// The residual `f̃(x) − x` is `1`-periodic and oscillates by less than one
    /// half around its value at `0`, so it is recovered exactly from the
    /// angle of the image direction without path tracking.
    pub fn eval(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.base.entries();
        let r0 = PI * self.offset;
        // Pick the matrix sign whose image of (1, 0) has angle r0 mod 2π.
        let s = if wrap_pi(c.atan2(a) - r0).abs() < PI / 2.0 { 1.0 } else { -1.0 };
        let (cx, sx) = ((PI * x).cos(), (PI * x).sin());
        let u = s * (a * cx + b * sx);
        let w = s * (c * cx + d * sx);
        let r = r0 + wrap_pi(w.atan2(u) - PI * x - r0);
        x + r / PI
    }

    pub fn compose(&self, h: &LiftedIsometry) -> LiftedIsometry {
        LiftedIsometry { base: self.base.compose(&h.base), offset: self.eval(h.offset) }
    }

    pub fn inverse(&self) -> LiftedIsometry {
        let candidate = LiftedIsometry::new(self.base.inverse());
        let n = self.eval(candidate.offset).round();
        LiftedIsometry { base: candidate.base, offset: candidate.offset - n }
    }
}

/// Value at `x` of the lift of `g` normalized to lie in `[0, 1)` at `0`.
pub fn lift_circle_map(g: &MoebiusTransform, x: f64) -> f64 {
    LiftedIsometry::new(*g).eval(x)
}

pub fn lifted_compose(g: &LiftedIsometry, h: &LiftedIsometry) -> LiftedIsometry {
    g.compose(h)
}

pub fn lifted_inverse(g: &LiftedIsometry) -> LiftedIsometry {
    g.inverse()
}

/// The lift lying on the one-parameter subgroup through `g`: its circle map
/// fixes the lifts of the fixed points of `g`.
pub fn canonical_lift(g: &MoebiusTransform) -> Result<LiftedIsometry> {
    let (attracting, _) = g.fixed_points()?;
    let theta = attracting.angle();
    let lift = LiftedIsometry::new(*g);
    let shift = (lift.eval(theta) - theta).round();
    Ok(lift.deck(-shift as i64))
}

pub fn central_integer(g: &LiftedIsometry) -> Result<i64> {
    if g.base.distance_from_identity() >= CENTRAL_TOL {
        return Err(Error::NotCentral);
    }
    let k = g.offset.round();
    if (g.offset - k).abs() >= ROUNDING_TOL {
        return Err(Error::AmbiguousRounding(g.offset));
    }
    Ok(k as i64)
}

pub fn central_element(g: &LiftedIsometry) -> Result<CentralElement> {
    central_integer(g).map(|k| CentralElement { k })
}

fn boundary_lifts(rep: &PantsRep) -> Result<[MoebiusTransform; 3]> {
    let images = [rep.alpha, rep.beta, rep.gamma()];
    let names = [Boundary::Alpha, Boundary::Beta, Boundary::Gamma];
    for (g, name) in images.iter().zip(names) {
        if !g.is_hyperbolic() {
            return Err(Error::BoundaryNotHyperbolic(name));
        }
    }
    Ok(images)
}

/// Central integer of the product of the canonical lifts of the three
/// boundary images.
pub fn euler_class_pants(rep: &PantsRep) -> Result<i64> {
    let [a, b, c] = boundary_lifts(rep)?;
    let product = canonical_lift(&a)?.compose(&canonical_lift(&b)?).compose(&canonical_lift(&c)?);
    central_integer(&product)
}

/// `0` when the product of positive-trace SL(2,R) lifts of the boundary images
/// is `+Id`, `1` when it is `−Id`.
pub fn euler_parity_pants(rep: &PantsRep) -> Result<u8> {
    let [a, b, c] = boundary_lifts(rep)?;
    let product = a.as_mat2() * b.as_mat2() * c.as_mat2();
    Ok(if product.trace() > 0.0 { 0 } else { 1 })
}

/// Euler class of a surface representation given by images of standard
/// generators `α₁, β₁, …, α_g, β_g` with relator `∏[αᵢ, βᵢ]`.
pub fn euler_class_commutator(images: &[MoebiusTransform], genus: usize) -> Result<i64> {
    if images.len() != 2 * genus {
        return Err(Error::WrongGeneratorCount { expected: 2 * genus, got: images.len() });
    }
    let lifts: Vec<LiftedIsometry> = images.iter().map(|g| LiftedIsometry::new(*g)).collect();
    euler_class_commutator_lifted(&lifts)
}

/// As [`euler_class_commutator`], with caller-chosen lifts.
pub fn euler_class_commutator_lifted(lifts: &[LiftedIsometry]) -> Result<i64> {
    euler_class_relator_lifted(lifts, &commutator_relator(lifts.len() / 2))
}

/// Euler class for a one-relator presentation in which every generator has
/// exponent sum zero in the relator. Lifts are arbitrary.
pub fn euler_class_relator(images: &[MoebiusTransform], relator: &[Letter]) -> Result<i64> {
    let lifts: Vec<LiftedIsometry> = images.iter().map(|g| LiftedIsometry::new(*g)).collect();
    euler_class_relator_lifted(&lifts, relator)
}

pub fn euler_class_relator_lifted(lifts: &[LiftedIsometry], relator: &[Letter]) -> Result<i64> {
    let mut base = DdMat::IDENTITY;
    for l in relator {
        let g = lifts.get(l.generator()).ok_or(Error::BadIndex(l.generator()))?.base;
        base = base * DdMat::from(if l.is_inverse() { g.inverse() } else { g });
    }
    relator_central(lifts, relator, base.to_moebius())
}

/// Central integer of the relator evaluated on `lifts`, where `base` is the
/// relator's image computed by the caller.
pub(crate) fn relator_central(lifts: &[LiftedIsometry], relator: &[Letter], base: MoebiusTransform) -> Result<i64> {
    let inverses: Vec<LiftedIsometry> = lifts.iter().map(LiftedIsometry::inverse).collect();
    // Offsets are pushed through one factor at a time from the right, so each
    // step evaluates a single generator.
    let mut offset = 0.0;
    for l in relator.iter().rev() {
        let g = l.generator();
        if g >= lifts.len() {
            return Err(Error::BadIndex(g));
        }
        offset = if l.is_inverse() { &inverses[g] } else { &lifts[g] }.eval(offset);
    }
    let residue = base.distance_from_identity();
    if residue >= RELATOR_TOL {
        return Err(Error::RelatorViolated(residue));
    }
    central_integer(&LiftedIsometry { base, offset })
}

/// The standard surface relator `∏[aᵢ, bᵢ]` on `2g` generators.
pub(crate) fn commutator_relator(genus: usize) -> Vec<Letter> {
    (0..genus)
        .flat_map(|i| {
            let (a, b) = (2 * i, 2 * i + 1);
            [Letter::new(a, false), Letter::new(b, false), Letter::new(a, true), Letter::new(b, true)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::BoundaryPoint;
    use crate::pants::{build_pants_rep, BoundaryLengths, Branch};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut impl Rng) -> MoebiusTransform {
        loop {
            let v: [f64; 3] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            if v[0].abs() < 0.2 {
                continue;
            }
            if let Ok(g) = MoebiusTransform::new(v[0], v[1], v[2], (1.0 + v[1] * v[2]) / v[0]) {
                return g;
            }
        }
    }

    fn half_turn() -> MoebiusTransform {
        MoebiusTransform::new(0.0, 1.0, -1.0, 0.0).unwrap()
    }

    #[test]
    fn identity_lift_is_identity_map() {
        for x in [-1.3, 0.0, 0.25, 0.7, 5.5] {
            assert!((lift_circle_map(&MoebiusTransform::IDENTITY, x) - x).abs() < 1e-15);
        }
    }

    #[test]
    fn half_turn_is_translation_by_one_half() {
        assert!((lift_circle_map(&half_turn(), 0.0) - 0.5).abs() < 1e-15);
        // Sample 16 directions and track the image angle of each.
        let lift = LiftedIsometry::new(half_turn());
        for i in 0..16 {
            let x = i as f64 / 16.0;
            let (c, s) = ((PI * x).cos(), (PI * x).sin());
            let img = (-c).atan2(s) / PI; // (s, -c) = M·(c, s)
            let fx = lift.eval(x);
            assert!((fx - x - 0.5).abs() < 1e-12, "x = {x}: {fx}");
            assert!(((fx - img).rem_euclid(1.0)).min(1.0 - (fx - img).rem_euclid(1.0)) < 1e-12);
        }
    }

    #[test]
    fn lift_is_degree_one_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let lift = LiftedIsometry::new(random_element(&mut rng));
            let x: f64 = rng.gen_range(-3.0..3.0);
            assert!((lift.eval(x + 1.0) - lift.eval(x) - 1.0).abs() < 1e-12);
            let mut prev = lift.eval(x);
            for i in 1..=64 {
                let v = lift.eval(x + i as f64 / 64.0);
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn lift_matches_boundary_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let g = random_element(&mut rng);
            let lift = LiftedIsometry::new(g);
            let p = rng.gen_range(-5.0..5.0);
            let theta = BoundaryPoint::Finite(p).angle();
            let image = g.apply_boundary(BoundaryPoint::Finite(p)).angle();
            let fx = lift.eval(theta).rem_euclid(1.0);
            let d = (fx - image).rem_euclid(1.0);
            assert!(d.min(1.0 - d) < 1e-10);
        }
    }

    #[test]
    fn half_turn_squared_is_central_one() {
        let h = LiftedIsometry::new(half_turn());
        let full = h.compose(&h);
        assert_eq!(central_integer(&full).unwrap(), 1);
        assert_eq!(central_element(&full).unwrap(), CentralElement { k: 1 });
    }

    #[test]
    fn compose_with_inverse_is_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let g = LiftedIsometry::new(random_element(&mut rng)).deck(rng.gen_range(-3..3));
            assert_eq!(central_integer(&g.compose(&g.inverse())).unwrap(), 0);
            assert_eq!(central_integer(&g.inverse().compose(&g)).unwrap(), 0);
        }
    }

    #[test]
    fn lifted_composition_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..300 {
            let [f, g, h] = [0, 1, 2].map(|_| LiftedIsometry::new(random_element(&mut rng)));
            let left = f.compose(&g).compose(&h);
            let right = f.compose(&g.compose(&h));
            assert!((left.offset - right.offset).abs() < 1e-9);
        }
    }

    #[test]
    fn central_integer_errors() {
        assert_eq!(central_integer(&LiftedIsometry::IDENTITY).unwrap(), 0);
        let hyp = LiftedIsometry::new(MoebiusTransform::translation(1.0));
        assert!(matches!(central_integer(&hyp), Err(Error::NotCentral)));
        let fuzzy = LiftedIsometry { base: MoebiusTransform::IDENTITY, offset: 0.4 };
        assert!(matches!(central_integer(&fuzzy), Err(Error::AmbiguousRounding(_))));
    }

    #[test]
    fn canonical_lift_of_diagonal_fixes_zero_and_infinity() {
        let g = MoebiusTransform::translation(1.0);
        let lift = canonical_lift(&g).unwrap();
        assert!(lift.eval(0.0).abs() < 1e-14);
        assert!((lift.eval(0.5) - 0.5).abs() < 1e-14);
        assert!(matches!(
            canonical_lift(&MoebiusTransform::new(1.0, 1.0, 0.0, 1.0).unwrap()),
            Err(Error::NotHyperbolic)
        ));
    }

    #[test]
    fn canonical_lift_has_fixed_points_and_respects_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut n = 0;
        while n < 100 {
            let g = random_element(&mut rng);
            if !g.is_hyperbolic() {
                continue;
            }
            n += 1;
            let lift = canonical_lift(&g).unwrap();
            let (attr, rep) = g.fixed_points().unwrap();
            for p in [attr, rep] {
                let t = p.angle();
                assert!((lift.eval(t) - t).abs() < 1e-9);
            }
            let mut power = lift;
            for k in 2..=4 {
                power = power.compose(&lift);
                let direct = canonical_lift(&g.pow(k)).unwrap();
                assert!((power.offset - direct.offset).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pants_euler_class_and_parity() {
        let l = BoundaryLengths::new(1.0, 1.0, 1.0).unwrap();
        let geometric = build_pants_rep(&l, -1, Branch::Generic).unwrap();
        let folded = build_pants_rep(&l, 1, Branch::Generic).unwrap();
        assert_eq!(euler_class_pants(&geometric).unwrap().abs(), 1);
        assert_eq!(euler_class_pants(&folded).unwrap(), 0);
        assert_eq!(euler_parity_pants(&geometric).unwrap(), 1);
        assert_eq!(euler_parity_pants(&folded).unwrap(), 0);
        let abelian = build_pants_rep(&BoundaryLengths::new(2.0, 1.0, 1.0).unwrap(), 1, Branch::Diagonal).unwrap();
        assert_eq!(euler_class_pants(&abelian).unwrap(), 0);
    }

    #[test]
    fn commutator_euler_class_of_trivial_rep() {
        let images = vec![MoebiusTransform::IDENTITY; 4];
        assert_eq!(euler_class_commutator(&images, 2).unwrap(), 0);
        assert!(matches!(euler_class_commutator(&images, 3), Err(Error::WrongGeneratorCount { .. })));
    }

    #[test]
    fn commutator_rejects_non_relation() {
        let images = vec![MoebiusTransform::translation(1.0), half_turn()];
        assert!(matches!(euler_class_commutator(&images, 1), Err(Error::RelatorViolated(_))));
    }
}
