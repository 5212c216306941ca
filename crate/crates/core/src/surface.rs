//! Pants decompositions, Fenchel–Nielsen assembly of Fuchsian holonomies, and
//! surface representations evaluated on words.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::dd::DdMat;
use crate::error::{Error, Result};
use crate::moebius::{frame_to, HPoint, Mat2, MoebiusTransform};
use crate::pants::{build_pants_rep, BoundaryLengths, Branch, PantsRep};
use crate::presentation::{build_presentation, slot_word, standard_generators, HnnEdge, Presentation, Slot, TreeEdge};
use crate::univcover::{commutator_relator, euler_class_pants, relator_central, LiftedIsometry};
use crate::words::{Letter, Word};

/// Largest relation residue accepted from an assembly.
pub const RESIDUE_TOL: f64 = 1e-8;

/// Pants with three boundary slots each, glued in pairs along cuffs.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsDecomposition {
    ids: Vec<String>,
    cuffs: Vec<[Slot; 2]>,
}

impl PantsDecomposition {
    /// Pants are numbered by position; `ids` are display names.
    pub fn new(ids: Vec<String>, cuffs: Vec<[Slot; 2]>) -> Self {
        PantsDecomposition { ids, cuffs }
    }

    /// Numbered pants `0..n` glued along the given slot pairs.
    pub fn from_pairs(pants: usize, cuffs: &[((usize, usize), (usize, usize))]) -> Self {
        let ids = (0..pants).map(|i| i.to_string()).collect();
        let cuffs = cuffs.iter().map(|&((p, s), (q, t))| [Slot::new(p, s), Slot::new(q, t)]).collect();
        PantsDecomposition { ids, cuffs }
    }

    pub fn pants_count(&self) -> usize {
        self.ids.len()
    }

    pub fn cuff_count(&self) -> usize {
        self.cuffs.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn cuffs(&self) -> &[[Slot; 2]] {
        &self.cuffs
    }

    pub fn genus(&self) -> usize {
        self.ids.len() / 2 + 1
    }

    /// Cuff glued to a slot, with the slot on the other side. Only meaningful
    /// on validated decompositions.
    pub fn cuff_at(&self, s: Slot) -> Option<(usize, Slot)> {
        self.cuffs.iter().enumerate().find_map(|(i, c)| {
            if c[0] == s {
                Some((i, c[1]))
            } else if c[1] == s {
                Some((i, c[0]))
            } else {
                None
            }
        })
    }

    /// True when two distinct pants share a cuff.
    pub fn adjacent(&self, p: usize, q: usize) -> bool {
        self.cuffs.iter().any(|c| (c[0].pants == p && c[1].pants == q) || (c[0].pants == q && c[1].pants == p))
    }

    /// Pants glued to themselves along some cuff.
    pub fn self_glued(&self, p: usize) -> bool {
        self.cuffs.iter().any(|c| c[0].pants == p && c[1].pants == p)
    }

    /// The two-pants decomposition of genus 2 glued slot-to-slot.
    pub fn theta() -> Self {
        Self::from_pairs(2, &[((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 2), (1, 2))])
    }

    /// Genus 2 as two one-holed tori joined along a separating cuff.
    pub fn dumbbell() -> Self {
        Self::from_pairs(2, &[((0, 0), (0, 1)), ((1, 0), (1, 1)), ((0, 2), (1, 2))])
    }

    /// Genus 3: four pants, each glued once to every other pants.
    pub fn tetrahedron() -> Self {
        Self::from_pairs(
            4,
            &[((0, 0), (1, 0)), ((0, 1), (2, 0)), ((0, 2), (3, 0)), ((1, 1), (2, 1)), ((2, 2), (3, 1)), ((3, 2), (1, 2))],
        )
    }

    /// Genus 3: three one-holed tori around a central pants. Cuffs `0..3`
    /// join the centre to the tori, cuffs `3..6` close up the handles.
    pub fn star() -> Self {
        Self::from_pairs(
            4,
            &[((0, 0), (1, 2)), ((0, 1), (2, 2)), ((0, 2), (3, 2)), ((1, 0), (1, 1)), ((2, 0), (2, 1)), ((3, 0), (3, 1))],
        )
    }

    /// Number of cuffs joining `p` to some pants in `set`, counting a cuff
    /// glued to `p` on both sides once.
    pub fn cuffs_towards(&self, p: usize, set: &[bool]) -> usize {
        self.cuffs
            .iter()
            .filter(|c| (c[0].pants == p && set[c[1].pants]) || (c[1].pants == p && set[c[0].pants]))
            .count()
    }

    /// Number of other pants sharing a cuff with `p`.
    pub fn neighbour_count(&self, p: usize) -> usize {
        (0..self.pants_count()).filter(|&q| q != p && self.adjacent(p, q)).count()
    }

    /// Genus 3: a ring of four pants with two handles.
    pub fn ring() -> Self {
        Self::from_pairs(
            4,
            &[((0, 0), (1, 0)), ((1, 1), (2, 0)), ((2, 1), (3, 0)), ((3, 1), (0, 1)), ((0, 2), (2, 2)), ((1, 2), (3, 2))],
        )
    }
}

pub fn validate_decomposition(pd: &PantsDecomposition) -> Result<usize> {
    let n = pd.pants_count();
    for c in &pd.cuffs {
        for s in c {
            if s.pants >= n || s.slot > 2 {
                return Err(Error::BadReference(format!("slot ({}, {})", s.pants, s.slot)));
            }
        }
    }
    let mut seen = vec![0usize; 3 * n];
    for c in &pd.cuffs {
        for s in c {
            seen[3 * s.pants + s.slot] += 1;
        }
    }
    if let Some(i) = seen.iter().position(|&k| k != 1) {
        return Err(Error::UnmatchedSlot { pants: i / 3, slot: i % 3 });
    }
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    if n > 0 {
        visited[0] = true;
    }
    while let Some(p) = queue.pop_front() {
        for c in &pd.cuffs {
            for (a, b) in [(c[0], c[1]), (c[1], c[0])] {
                if a.pants == p && !visited[b.pants] {
                    visited[b.pants] = true;
                    queue.push_back(b.pants);
                }
            }
        }
    }
    if visited.iter().any(|v| !v) {
        return Err(Error::Disconnected);
    }
    if n < 2 || n % 2 != 0 || pd.cuffs.len() != 3 * n / 2 {
        return Err(Error::BadCount { pants: n, cuffs: pd.cuffs.len() });
    }
    Ok(n / 2 + 1)
}

/// Cuff lengths and twists, indexed by cuff.
#[derive(Debug, Clone, PartialEq)]
pub struct FNCoordinates {
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl FNCoordinates {
    pub fn new(lengths: Vec<f64>, twists: Vec<f64>) -> Result<Self> {
        if lengths.len() != twists.len() {
            return Err(Error::BadParameter(format!("{} lengths but {} twists", lengths.len(), twists.len())));
        }
        if let Some(&l) = lengths.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::NonPositiveLength(l));
        }
        if twists.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(FNCoordinates { lengths, twists })
    }

    /// All cuffs of the same length with zero twist.
    pub fn uniform(cuffs: usize, length: f64) -> Result<Self> {
        Self::new(vec![length; cuffs], vec![0.0; cuffs])
    }

    fn check_for(&self, pd: &PantsDecomposition) -> Result<()> {
        if self.lengths.len() != pd.cuff_count() {
            return Err(Error::BadParameter(format!(
                "{} lengths for {} cuffs",
                self.lengths.len(),
                pd.cuff_count()
            )));
        }
        Self::new(self.lengths.clone(), self.twists.clone()).map(|_| ())
    }
}

/// Spanning tree of the adjacency multigraph grown breadth-first from pants
/// `0`, with the remaining cuffs as stable-letter gluings.
pub fn gluing_plan(pd: &PantsDecomposition) -> (Vec<TreeEdge>, Vec<HnnEdge>) {
    let n = pd.pants_count();
    let mut visited = vec![false; n];
    let mut used = vec![false; pd.cuff_count()];
    let mut tree = Vec::new();
    let mut hnn = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(p) = queue.pop_front() {
        for s in 0..3 {
            let here = Slot::new(p, s);
            let Some((cuff, there)) = pd.cuff_at(here) else { continue };
            if used[cuff] {
                continue;
            }
            used[cuff] = true;
            if visited[there.pants] {
                hnn.push(HnnEdge { cuff, near: here, far: there });
            } else {
                visited[there.pants] = true;
                queue.push_back(there.pants);
                tree.push(TreeEdge { cuff, parent: here, child: there });
            }
        }
    }
    (tree, hnn)
}

/// Geometric pants rep with the given boundary lengths and Euler class `+1`.
pub fn local_geometric_pants(lengths: &BoundaryLengths) -> Result<PantsRep> {
    let rep = build_pants_rep(lengths, -1, Branch::Generic)?;
    if euler_class_pants(&rep)? == 1 {
        Ok(rep)
    } else {
        Ok(rep.conjugate_mat(&Mat2::new(1.0, 0.0, 0.0, -1.0)))
    }
}

/// Isometry taking the imaginary axis to the axis of slot `s` (repelling end
/// at `0`), normalized so that `i` is the foot of the common perpendicular to
/// the axis of slot `s + 1`.
pub fn slot_frame(rep: &PantsRep, s: usize) -> Result<MoebiusTransform> {
    let b = rep.boundary();
    let (attr, repel) = b[s].fixed_points()?;
    let h0 = frame_to(repel, attr);
    let (p, q) = b[(s + 1) % 3].fixed_points()?;
    let inv = h0.inverse();
    let (u, v) = match (inv.apply_boundary(p).finite(), inv.apply_boundary(q).finite()) {
        (Some(u), Some(v)) if u * v > 0.0 => (u, v),
        _ => return Err(Error::AssemblyResidue(f64::INFINITY)),
    };
    let k = (u * v).sqrt().sqrt();
    Ok(h0.compose(&MoebiusTransform::new(k, 0.0, 0.0, 1.0 / k)?))
}

/// `z ↦ −1/z`, reversing the imaginary axis.
pub fn half_turn() -> MoebiusTransform {
    MoebiusTransform::new(0.0, 1.0, -1.0, 0.0).expect("unit determinant")
}

/// Local pants reps with boundary frames, placed in a common frame by
/// crossing each cuff with its twist.
#[derive(Debug, Clone)]
pub struct FuchsianFrames {
    pub local: Vec<PantsRep>,
    pub slot_frames: Vec<[MoebiusTransform; 3]>,
    /// Placement of each local pants in the global frame.
    pub placement: Vec<DdMat>,
    pub tree: Vec<TreeEdge>,
    pub hnn: Vec<HnnEdge>,
}

impl FuchsianFrames {
    /// Frames of the geometric local pants with the root placed by `root`.
    pub fn build(pd: &PantsDecomposition, fnc: &FNCoordinates, root: MoebiusTransform) -> Result<Self> {
        let (local, slot_frames) = geometric_locals(pd, fnc)?;
        Self::place(pd, fnc, local, slot_frames, root)
    }

    /// Places arbitrary local reps whose slot `s` holonomy is
    /// `F · T(ℓ) · F⁻¹` for the frame `F = slot_frames[p][s]`.
    pub fn place(
        pd: &PantsDecomposition,
        fnc: &FNCoordinates,
        local: Vec<PantsRep>,
        slot_frames: Vec<[MoebiusTransform; 3]>,
        root: MoebiusTransform,
    ) -> Result<Self> {
        validate_decomposition(pd)?;
        fnc.check_for(pd)?;
        if local.len() != pd.pants_count() || slot_frames.len() != pd.pants_count() {
            return Err(Error::PresentationMismatch);
        }
        let (tree, hnn) = gluing_plan(pd);
        let mut placement = vec![DdMat::from(root); pd.pants_count()];
        for e in &tree {
            placement[e.child.pants] =
                placement[e.parent.pants] * Self::crossing(&slot_frames, e.parent, e.child, fnc.twists[e.cuff]);
        }
        Ok(FuchsianFrames { local, slot_frames, placement, tree, hnn })
    }

    /// `G_near · T(τ) · R · G_far⁻¹`: carries the far pants frame across the
    /// cuff with the given twist.
    fn crossing(frames: &[[MoebiusTransform; 3]], near: Slot, far: Slot, twist: f64) -> DdMat {
        DdMat::from(frames[near.pants][near.slot])
            * MoebiusTransform::translation(twist).into()
            * half_turn().into()
            * frames[far.pants][far.slot].inverse().into()
    }

    pub fn stable_letter(&self, e: &HnnEdge, twist: f64) -> MoebiusTransform {
        (self.placement[e.near.pants]
            * Self::crossing(&self.slot_frames, e.near, e.far, twist)
            * self.placement[e.far.pants].adjugate())
        .to_moebius()
    }

    /// The local pants rep of `p` moved into the global frame.
    pub fn placed_pants(&self, p: usize) -> PantsRep {
        let m = self.placement[p];
        let place = |g: MoebiusTransform| (m * g.into() * m.adjugate()).to_moebius();
        PantsRep::new(place(self.local[p].alpha), place(self.local[p].beta))
    }
}

/// Centred geometric local pants for every pants, with their slot frames.
pub fn geometric_locals(
    pd: &PantsDecomposition,
    fnc: &FNCoordinates,
) -> Result<(Vec<PantsRep>, Vec<[MoebiusTransform; 3]>)> {
    validate_decomposition(pd)?;
    fnc.check_for(pd)?;
    let n = pd.pants_count();
    let mut local = Vec::with_capacity(n);
    let mut slot_frames = Vec::with_capacity(n);
    for p in 0..n {
        let l = |s| fnc.lengths[pd.cuff_at(Slot::new(p, s)).expect("validated").0];
        let rep = local_geometric_pants(&BoundaryLengths::new(l(0), l(1), l(2))?)?;
        let rep = rep.conjugate(&centering_frame(&[rep.alpha, rep.beta]).inverse());
        slot_frames.push([slot_frame(&rep, 0)?, slot_frame(&rep, 1)?, slot_frame(&rep, 2)?]);
        local.push(rep);
    }
    Ok((local, slot_frames))
}

/// A representation of a closed surface group built from a pants
/// decomposition, with images of every pants generator and stable letter.
#[derive(Debug, Clone)]
pub struct SurfaceRep {
    decomposition: PantsDecomposition,
    presentation: Arc<Presentation>,
    pants: Vec<PantsRep>,
    stable: Vec<MoebiusTransform>,
    generators: Vec<MoebiusTransform>,
}

impl SurfaceRep {
    /// Assembles a representation from per-pants images and stable-letter
    /// images, checking every gluing relation.
    pub fn from_parts(
        decomposition: PantsDecomposition,
        presentation: Arc<Presentation>,
        pants: Vec<PantsRep>,
        stable: Vec<MoebiusTransform>,
    ) -> Result<Self> {
        if pants.len() != presentation.pants_count || stable.len() != presentation.hnn.len() {
            return Err(Error::PresentationMismatch);
        }
        let mut rep = SurfaceRep { decomposition, presentation, pants, stable, generators: Vec::new() };
        rep.refresh_generators();
        let residue = rep.relation_residue();
        if !(residue <= RESIDUE_TOL) {
            return Err(Error::AssemblyResidue(residue));
        }
        Ok(rep)
    }

    fn refresh_generators(&mut self) {
        self.generators = self.presentation.basis.iter().map(|&i| self.original_image(i)).collect();
    }

    pub fn decomposition(&self) -> &PantsDecomposition {
        &self.decomposition
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn presentation_arc(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn genus(&self) -> usize {
        self.presentation.genus
    }

    pub fn pants_reps(&self) -> &[PantsRep] {
        &self.pants
    }

    pub fn stable_letters(&self) -> &[MoebiusTransform] {
        &self.stable
    }

    /// Images of the `2g` basis generators.
    pub fn generators(&self) -> &[MoebiusTransform] {
        &self.generators
    }

    /// Image of an original generator (`α_P`, `β_P`, then stable letters).
    pub fn original_image(&self, index: usize) -> MoebiusTransform {
        let n = 2 * self.pants.len();
        if index < n {
            let p = &self.pants[index / 2];
            if index % 2 == 0 {
                p.alpha
            } else {
                p.beta
            }
        } else {
            self.stable[index - n]
        }
    }

    pub fn slot_image(&self, s: Slot) -> MoebiusTransform {
        self.pants[s.pants].boundary()[s.slot]
    }

    /// Holonomy of a cuff, read from the first side of its gluing.
    pub fn cuff_holonomy(&self, cuff: usize) -> Result<MoebiusTransform> {
        let p = &self.presentation;
        p.tree
            .iter()
            .find(|e| e.cuff == cuff)
            .map(|e| e.parent)
            .or_else(|| p.hnn.iter().find(|e| e.cuff == cuff).map(|e| e.near))
            .map(|s| self.slot_image(s))
            .ok_or_else(|| Error::BadReference(format!("cuff {cuff}")))
    }

    /// Largest entrywise deviation from the identity over the gluing
    /// relations, which define the group.
    pub fn relation_residue(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for e in &self.presentation.tree {
            let r = self.slot_image(e.child).compose(&self.slot_image(e.parent));
            worst = worst.max(r.distance_from_identity());
        }
        for (k, e) in self.presentation.hnn.iter().enumerate() {
            let t = self.stable[k];
            let r = t.compose(&self.slot_image(e.far)).compose(&t.inverse()).compose(&self.slot_image(e.near));
            worst = worst.max(r.distance_from_identity());
        }
        worst
    }

    /// Deviation of the surface relator from the identity in basis images.
    pub fn relator_residue(&self) -> f64 {
        self.evaluate_letters(self.presentation.relator.letters()).map_or(f64::INFINITY, |g| g.distance_from_identity())
    }

    /// Product of generator images along a word in basis letters.
    pub fn evaluate_word(&self, w: &Word) -> Result<MoebiusTransform> {
        self.evaluate_letters(w.letters())
    }

    /// Products are accumulated in double-double and rounded once.
    pub fn evaluate_letters(&self, letters: &[Letter]) -> Result<MoebiusTransform> {
        Ok(self.evaluate_dd(letters)?.to_moebius())
    }

    fn evaluate_dd(&self, letters: &[Letter]) -> Result<DdMat> {
        let mut m = DdMat::IDENTITY;
        for l in letters {
            let g = self.generators.get(l.generator()).ok_or(Error::BadIndex(l.generator()))?;
            let x = if l.is_inverse() { g.inverse() } else { *g };
            m = m * x.into();
        }
        Ok(m)
    }

    /// Image of a word in the original generators.
    pub fn evaluate_original(&self, w: &Word) -> Result<MoebiusTransform> {
        let mut m = MoebiusTransform::IDENTITY;
        for l in w.letters() {
            if l.generator() >= self.presentation.original_count() {
                return Err(Error::BadIndex(l.generator()));
            }
            let g = self.original_image(l.generator());
            m = m.compose(&if l.is_inverse() { g.inverse() } else { g });
        }
        Ok(m)
    }

    /// Standard generators `a₁, b₁, …, a_g, b_g` adapted to this
    /// representation: starting from the presentation's words, handle moves
    /// `(a, b) ↦ (ab^{±1}, b), (a, ba^{±1})` and simultaneous conjugations are
    /// applied greedily while they shrink the matrix norms of the images.
    /// Both kinds of move preserve `∏[aᵢ, bᵢ]` up to conjugacy.
    pub fn standard_words(&self) -> Result<Vec<Word>> {
        let inverse = self.presentation.relator.inverse();
        let mut best: Option<(f64, Vec<Word>)> = None;
        for k in 0..inverse.len() {
            let Ok(start) = standard_generators(&inverse.rotate(k), self.genus()) else { continue };
            if start.iter().map(Word::len).sum::<usize>() > 6 * inverse.len() {
                continue;
            }
            let words = self.shrink_standard(start)?;
            let score: f64 = words.iter().map(|w| self.evaluate_word(w).map(|g| frobenius_sq(&g.as_mat2()))).sum::<Result<f64>>()?;
            if best.as_ref().map_or(true, |b| score < b.0) {
                best = Some((score, words));
            }
        }
        best.map(|b| b.1).ok_or_else(|| Error::Presentation("no standard generators".into()))
    }

    fn shrink_standard(&self, start: Vec<Word>) -> Result<Vec<Word>> {
        let max_total = 6 * self.presentation.relator.len();
        let mut words = start;
        let mut images: Vec<Mat2> = words.iter().map(|w| self.evaluate_word(w).map(|g| g.as_mat2())).collect::<Result<_>>()?;
        let norm = frobenius_sq;
        let letters: Vec<(Word, Mat2)> = (0..self.generators.len())
            .flat_map(|i| {
                let g = self.generators[i].as_mat2();
                [(Word::generator(i), g), (Word::generator(i).inverse(), g.inverse())]
            })
            .collect();
        for _ in 0..400 {
            let current: f64 = images.iter().map(norm).sum();
            let mut best: Option<(f64, Vec<Word>, Vec<Mat2>)> = None;
            let mut consider = |w: Vec<Word>, m: Vec<Mat2>| {
                if w.iter().map(Word::len).sum::<usize>() > max_total {
                    return;
                }
                let score: f64 = m.iter().map(norm).sum();
                if score < current * (1.0 - 1e-9) && best.as_ref().map_or(true, |b| score < b.0) {
                    best = Some((score, w, m));
                }
            };
            for i in 0..words.len() {
                let partner = i ^ 1;
                for inv in [false, true] {
                    let (pw, pm) = if inv {
                        (words[partner].inverse(), images[partner].inverse())
                    } else {
                        (words[partner].clone(), images[partner])
                    };
                    let mut w = words.clone();
                    let mut m = images.clone();
                    w[i] = w[i].mul(&pw);
                    m[i] = m[i] * pm;
                    consider(w, m);
                }
            }
            for (x, xm) in &letters {
                let xi = x.inverse();
                let xmi = xm.inverse();
                let w = words.iter().map(|w| x.mul(w).mul(&xi)).collect();
                let m = images.iter().map(|m| *xm * *m * xmi).collect();
                consider(w, m);
            }
            match best {
                Some((_, w, m)) => {
                    words = w;
                    images = m;
                }
                None => break,
            }
        }
        Ok(words)
    }

    /// Images of the standard generators of [`Self::standard_words`].
    pub fn standard_images(&self) -> Result<Vec<MoebiusTransform>> {
        self.standard_words()?.iter().map(|w| self.evaluate_word(w)).collect()
    }

    pub fn euler_class_commutator(&self) -> Result<i64> {
        let lifts: Vec<LiftedIsometry> = self.standard_images()?.into_iter().map(LiftedIsometry::new).collect();
        self.euler_class_commutator_lifted(&lifts)
    }

    /// As [`Self::euler_class_commutator`] with caller-chosen lifts of the
    /// standard images. The product of standard commutators is a conjugate of
    /// the presentation relator, so the residue is measured on the relator
    /// itself, where it is not inflated by the conjugator.
    pub fn euler_class_commutator_lifted(&self, lifts: &[LiftedIsometry]) -> Result<i64> {
        let g = self.genus();
        if lifts.len() != 2 * g {
            return Err(Error::WrongGeneratorCount { expected: 2 * g, got: lifts.len() });
        }
        let base = self.evaluate_dd(self.presentation.relator.letters())?;
        let relator = commutator_relator(g);
        relator_central(lifts, &relator, base.to_moebius())
    }

    /// Earthquake along a cuff: one side of the cut is conjugated by the
    /// translation of length `amount` along the cuff axis.
    pub fn twist_cuff(&self, cuff: usize, amount: f64) -> Result<SurfaceRep> {
        if cuff >= self.decomposition.cuff_count() {
            return Err(Error::BadReference(format!("cuff {cuff}")));
        }
        let c = self.cuff_holonomy(cuff)?;
        if !c.is_hyperbolic() {
            return Err(Error::NotHyperbolicCuff(cuff));
        }
        if amount == 0.0 {
            return Ok(self.clone());
        }
        let frame = DdMat::from(c.axis()?.frame());
        let shift = frame * MoebiusTransform::translation(amount).into() * frame.adjugate();
        let conj = |g: MoebiusTransform| (shift * g.into() * shift.adjugate()).to_moebius();
        let left = |g: MoebiusTransform| (shift * g.into()).to_moebius();
        let right = |g: MoebiusTransform| (DdMat::from(g) * shift.adjugate()).to_moebius();
        let mut out = self.clone();
        let pres = &self.presentation;
        if let Some(edge) = pres.tree.iter().find(|e| e.cuff == cuff) {
            let side = subtree(pres, edge.child.pants);
            for (p, rep) in out.pants.iter_mut().enumerate() {
                if side[p] {
                    *rep = PantsRep::new(conj(rep.alpha), conj(rep.beta));
                }
            }
            for (k, e) in pres.hnn.iter().enumerate() {
                out.stable[k] = match (side[e.near.pants], side[e.far.pants]) {
                    (true, true) => conj(out.stable[k]),
                    (true, false) => left(out.stable[k]),
                    (false, true) => right(out.stable[k]),
                    (false, false) => out.stable[k],
                };
            }
        } else {
            let k = pres.hnn.iter().position(|e| e.cuff == cuff).ok_or(Error::BadReference(format!("cuff {cuff}")))?;
            out.stable[k] = left(out.stable[k]);
        }
        out.refresh_generators();
        let residue = out.relation_residue();
        if !(residue <= RESIDUE_TOL) {
            return Err(Error::AssemblyResidue(residue));
        }
        Ok(out)
    }
}

fn frobenius_sq(m: &Mat2) -> f64 {
    m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d
}

/// Pants in the spanning subtree below `root`.
fn subtree(pres: &Presentation, root: usize) -> Vec<bool> {
    let mut side = vec![false; pres.pants_count];
    side[root] = true;
    for e in &pres.tree {
        if side[e.parent.pants] {
            side[e.child.pants] = true;
        }
    }
    side
}

/// Builds the shared presentation for a decomposition.
pub fn presentation_for(pd: &PantsDecomposition) -> Result<Arc<Presentation>> {
    validate_decomposition(pd)?;
    let (tree, hnn) = gluing_plan(pd);
    build_presentation(pd.pants_count(), tree, hnn).map(Arc::new)
}

/// Sum of `2 cosh d(z, g z)` over the generators, the squared Frobenius norm
/// after conjugating `z` to `i`.
fn displacement_energy(gens: &[MoebiusTransform], z: HPoint) -> f64 {
    gens.iter()
        .map(|g| {
            let w = g.apply(z);
            let d2 = (z.x - w.x).powi(2) + (z.y - w.y).powi(2);
            2.0 + d2 / (z.y * w.y)
        })
        .sum()
}

/// Isometry taking `i` to the point minimizing the total displacement of
/// the generators. Conjugating by its inverse keeps matrix entries small.
pub fn centering_frame(gens: &[MoebiusTransform]) -> MoebiusTransform {
    let at = |x: f64, s: f64| HPoint { x, y: s.exp() };
    let (mut x, mut s) = (0.0f64, 0.0f64);
    let mut f = displacement_energy(gens, at(x, s));
    let h = 1e-6;
    let mut step = 0.5;
    for _ in 0..500 {
        let y = s.exp();
        let gx = (displacement_energy(gens, at(x + h * y, s)) - displacement_energy(gens, at(x - h * y, s))) / (2.0 * h);
        let gs = (displacement_energy(gens, at(x, s + h)) - displacement_energy(gens, at(x, s - h))) / (2.0 * h);
        let norm = gx.hypot(gs);
        if norm < 1e-9 * f {
            break;
        }
        let mut moved = false;
        while step > 1e-12 {
            let (nx, ns) = (x - step * y * gx / norm, s - step * gs / norm);
            let nf = displacement_energy(gens, at(nx, ns));
            if nf < f {
                (x, s, f) = (nx, ns, nf);
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let y = s.exp();
    MoebiusTransform::new(y.sqrt(), x / y.sqrt(), 0.0, 1.0 / y.sqrt()).expect("unit determinant")
}

impl SurfaceRep {
    /// Conjugates every image so that the generators move `i` as little as
    /// possible.
    pub fn recentered(&self) -> Result<SurfaceRep> {
        let m = centering_frame(&self.generators).inverse();
        let pants = self.pants.iter().map(|r| r.conjugate(&m)).collect();
        let stable = self.stable.iter().map(|t| t.conjugate_by(&m)).collect();
        SurfaceRep::from_parts(self.decomposition.clone(), self.presentation.clone(), pants, stable)
    }
}

pub fn assemble_fuchsian(pd: &PantsDecomposition, fnc: &FNCoordinates) -> Result<SurfaceRep> {
    let (local, slot_frames) = geometric_locals(pd, fnc)?;
    assemble_from_frames(pd, fnc, local, slot_frames)
}

/// Glues local reps along their slot frames (see [`FuchsianFrames::place`]),
/// with the root placed so that the generators are centred at `i`.
pub fn assemble_from_frames(
    pd: &PantsDecomposition,
    fnc: &FNCoordinates,
    local: Vec<PantsRep>,
    slot_frames: Vec<[MoebiusTransform; 3]>,
) -> Result<SurfaceRep> {
    let presentation = presentation_for(pd)?;
    let build = |root| -> Result<SurfaceRep> {
        let frames = FuchsianFrames::place(pd, fnc, local.clone(), slot_frames.clone(), root)?;
        let pants = (0..pd.pants_count()).map(|p| frames.placed_pants(p)).collect();
        let stable = frames.hnn.iter().map(|e| frames.stable_letter(e, fnc.twists[e.cuff])).collect();
        let mut rep = SurfaceRep { decomposition: pd.clone(), presentation: presentation.clone(), pants, stable, generators: Vec::new() };
        rep.refresh_generators();
        Ok(rep)
    };
    // A centred root keeps every intermediate product small.
    let draft = build(MoebiusTransform::IDENTITY)?;
    let rep = build(centering_frame(draft.generators()).inverse())?;
    let residue = rep.relation_residue();
    if !(residue <= RESIDUE_TOL) {
        return Err(Error::AssemblyResidue(residue));
    }
    Ok(rep)
}

pub fn evaluate_word(rep: &SurfaceRep, w: &Word) -> Result<MoebiusTransform> {
    rep.evaluate_word(w)
}

/// Sum of the pants Euler classes.
pub fn euler_class_surface(rep: &SurfaceRep) -> Result<i64> {
    rep.pants.iter().map(euler_class_pants).sum()
}

pub fn twist_cuff(rep: &SurfaceRep, cuff: usize, amount: f64) -> Result<SurfaceRep> {
    rep.twist_cuff(cuff, amount)
}

/// Cuff word of a slot in original generators (see [`slot_word`]).
pub fn original_slot_word(s: Slot) -> Word {
    slot_word(s)
}
