//! Folded representations: each pants of a Fuchsian assembly is kept, flipped
//! or folded according to a label, and the pieces are reglued so that the
//! folding map is continuous across every cuff.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::moebius::{Geodesic, Mat2, MoebiusTransform};
use crate::pants::PantsRep;
use crate::surface::{
    assemble_fuchsian, assemble_from_frames, geometric_locals, validate_decomposition, FNCoordinates,
    PantsDecomposition, SurfaceRep,
};

/// `diag(1, −1)`, the reflection `z ↦ −z̄` as a conjugator.
const MIRROR: Mat2 = Mat2::new(1.0, 0.0, 0.0, -1.0);

/// A label in `{−1, 0, 1}` for every pants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling(Vec<i8>);

impl Labeling {
    pub fn new(labels: Vec<i64>) -> Result<Self> {
        labels
            .into_iter()
            .map(|l| if (-1..=1).contains(&l) { Ok(l as i8) } else { Err(Error::BadLabel(l)) })
            .collect::<Result<Vec<_>>>()
            .map(Labeling)
    }

    pub fn labels(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&l| l as i64).sum()
    }

    /// True when every label is `+1` or every label is `−1`.
    pub fn is_fuchsian(&self) -> bool {
        !self.0.is_empty() && (self.0.iter().all(|&l| l == 1) || self.0.iter().all(|&l| l == -1))
    }

    fn check_for(&self, pd: &PantsDecomposition) -> Result<()> {
        if self.0.len() != pd.pants_count() {
            return Err(Error::BadParameter(format!(
                "{} labels for {} pants",
                self.0.len(),
                pd.pants_count()
            )));
        }
        Ok(())
    }
}

/// Bending angle between plates of colors `c1, c2 ∈ {±1}`.
pub fn bending_angle(c1: i8, c2: i8) -> f64 {
    (1.0 - (c1 as f64) * (c2 as f64)) / 2.0 * PI
}

/// A labeling with sum `k` that is not of a single sign throughout.
///
/// The `|k|` signed labels are placed one at a time on the unlabeled pants
/// with the fewest cuffs towards already signed pants, then the fewest
/// neighbours, then the smallest index. Signed pants thus cluster as little
/// as the decomposition allows.
pub fn prescribe_labeling(pd: &PantsDecomposition, k: i64) -> Result<Labeling> {
    let genus = validate_decomposition(pd)?;
    let n = pd.pants_count();
    if k.unsigned_abs() as usize >= n {
        return Err(Error::ExtremalClass { k, genus });
    }
    let sign = k.signum() as i8;
    let mut signed = vec![false; n];
    for _ in 0..k.unsigned_abs() {
        let p = (0..n)
            .filter(|&p| !signed[p])
            .min_by_key(|&p| (pd.cuffs_towards(p, &signed), pd.neighbour_count(p), p))
            .expect("fewer signed labels than pants");
        signed[p] = true;
    }
    Ok(Labeling(signed.iter().map(|&s| if s { sign } else { 0 }).collect()))
}

/// The folded local rep of a geometric pants together with slot frames
/// adapted to the folding map.
///
/// The pants is cut into the ideal triangles `(x_α, x_β, x_γ)` and
/// `(x_α, x_β, β·x_γ)`, where `x` is the attracting fixed point. The map is
/// the identity on the first and the reflection across their common edge on
/// the second. On each boundary axis it is the projection along horocycles
/// centred at the shared fixed point.
pub fn fold_local(
    j: &PantsRep,
    frames: &[MoebiusTransform; 3],
) -> Result<(PantsRep, [MoebiusTransform; 3])> {
    let b = j.boundary();
    let x = [b[0].fixed_points()?.0, b[1].fixed_points()?.0, b[2].fixed_points()?.0];
    let y = j.beta.apply_boundary(x[2]);
    let r0 = Geodesic::new(x[0], x[1])?.reflection();
    let r1 = Geodesic::new(x[1], y)?.reflection();
    let r2 = Geodesic::new(y, x[0])?.reflection();
    let beta = (r0 * r1 * j.beta.as_mat2()).to_moebius()?;
    let alpha = (j.alpha.as_mat2() * r2 * r0).to_moebius()?;
    let rho = PantsRep::new(alpha, beta);
    let rb = rho.boundary();
    let mut out = *frames;
    for s in 0..3 {
        let repel = rb[s].fixed_points()?.1;
        let c = frames[s]
            .inverse()
            .apply_boundary(repel)
            .finite()
            .ok_or_else(|| Error::BadParameter("folded boundary axis through infinity".into()))?;
        out[s] = frames[s].compose(&MoebiusTransform::new(1.0, c, 0.0, 1.0)?);
    }
    Ok((rho, out))
}

/// The Fuchsian assembly `j` and its folding `ρ` along the labels.
pub fn fold_surface(
    pd: &PantsDecomposition,
    fnc: &FNCoordinates,
    labels: &Labeling,
) -> Result<(SurfaceRep, SurfaceRep)> {
    labels.check_for(pd)?;
    let j = assemble_fuchsian(pd, fnc)?;
    let (local, frames) = geometric_locals(pd, fnc)?;
    let mut rho_local = Vec::with_capacity(local.len());
    let mut rho_frames = Vec::with_capacity(local.len());
    for ((rep, fr), &label) in local.iter().zip(&frames).zip(labels.labels()) {
        let (r, f) = match label {
            1 => (*rep, *fr),
            -1 => (rep.conjugate_mat(&MIRROR), fr.map(|g| MIRROR.conjugate(&g))),
            _ => fold_local(rep, fr)?,
        };
        rho_local.push(r);
        rho_frames.push(f);
    }
    let rho = assemble_from_frames(pd, fnc, rho_local, rho_frames)?;
    Ok((j, rho))
}
