//! One-relator presentations of closed surface groups derived from a pants
//! decomposition.
//!
//! The graph-of-groups presentation has generators `α_P, β_P` for every pants
//! `P` and one stable letter `t_e` for every cuff outside a spanning tree.
//! Tree relations and all but one stable-letter relation are removed by
//! Tietze moves, leaving `2g` generators, each one of the original ones, and a
//! single quadratic relator. That relator is then rewritten as a product of
//! `g` commutators in new words.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

/// A boundary slot of a pants: `0` for `α`, `1` for `β`, `2` for `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub pants: usize,
    pub slot: usize,
}

impl Slot {
    pub fn new(pants: usize, slot: usize) -> Self {
        Slot { pants, slot }
    }
}

/// Gluing along a spanning-tree cuff: the child's slot element is the inverse
/// of the parent's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeEdge {
    pub cuff: usize,
    pub parent: Slot,
    pub child: Slot,
}

/// Gluing along a non-tree cuff through the stable letter `t`:
/// `t · c_far · t⁻¹ = c_near⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HnnEdge {
    pub cuff: usize,
    pub near: Slot,
    pub far: Slot,
}

pub fn alpha_index(pants: usize) -> usize {
    2 * pants
}

pub fn beta_index(pants: usize) -> usize {
    2 * pants + 1
}

/// Word of a slot element in the original generators.
pub fn slot_word(s: Slot) -> Word {
    let (a, b) = (alpha_index(s.pants), beta_index(s.pants));
    match s.slot {
        0 => Word::new(vec![Letter::new(a, false)]),
        1 => Word::new(vec![Letter::new(b, false)]),
        _ => Word::new(vec![Letter::new(b, true), Letter::new(a, true)]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Presentation {
    pub pants_count: usize,
    pub genus: usize,
    pub tree: Vec<TreeEdge>,
    pub hnn: Vec<HnnEdge>,
    /// Original generator index of each basis generator.
    pub basis: Vec<usize>,
    /// Every original generator as a word in basis letters.
    pub expressions: Vec<Word>,
    /// The surface relator in basis letters.
    pub relator: Word,
    /// Words `a₁, b₁, …, a_g, b_g` in basis letters with `∏[aᵢ, bᵢ]`
    /// conjugate to the inverse relator.
    pub standard: Vec<Word>,
}

impl Presentation {
    pub fn original_count(&self) -> usize {
        2 * self.pants_count + self.hnn.len()
    }

    pub fn basis_count(&self) -> usize {
        self.basis.len()
    }

    pub fn original_name(&self, index: usize) -> String {
        let n = 2 * self.pants_count;
        if index < n {
            let kind = if index % 2 == 0 { "alpha" } else { "beta" };
            format!("{kind}{}", index / 2)
        } else {
            format!("t{}", self.hnn[index - n].cuff)
        }
    }

    /// Rewrites a word in original generators as a reduced word in basis
    /// letters.
    pub fn to_basis(&self, original: &Word) -> Word {
        let mut out = Vec::new();
        for l in original.letters() {
            let e = &self.expressions[l.generator()];
            if l.is_inverse() {
                out.extend(e.inverse().letters().iter().copied());
            } else {
                out.extend(e.letters().iter().copied());
            }
        }
        Word::new(out).free_reduce()
    }

    /// Slot element of a pants as a word in basis letters.
    pub fn slot_in_basis(&self, s: Slot) -> Word {
        self.to_basis(&slot_word(s))
    }

    /// Cuff words in basis letters, taken from the first side of each tree or
    /// stable-letter gluing, indexed by cuff.
    pub fn cuff_words(&self) -> Vec<Word> {
        let count = self.tree.len() + self.hnn.len();
        let mut out = vec![Word::empty(); count];
        for e in &self.tree {
            out[e.cuff] = self.slot_in_basis(e.parent);
        }
        for e in &self.hnn {
            out[e.cuff] = self.slot_in_basis(e.near);
        }
        out
    }

    /// Product of the standard commutators, for verification.
    pub fn standard_product(&self) -> Word {
        let mut w = Word::empty();
        for pair in self.standard.chunks(2) {
            let (a, b) = (&pair[0], &pair[1]);
            w = w.mul(a).mul(b).mul(&a.inverse()).mul(&b.inverse());
        }
        w
    }
}

/// Builds the presentation for a gluing graph given by its tree and
/// stable-letter edges. Tree edges must be listed parents-first.
pub fn build_presentation(pants_count: usize, tree: Vec<TreeEdge>, hnn: Vec<HnnEdge>) -> Result<Presentation> {
    let genus = hnn.len();
    let total = 2 * pants_count + genus;
    let mut subst: Vec<Option<Word>> = vec![None; total];

    for e in &tree {
        let c = expand(&slot_word(e.parent), &subst);
        let (a, b) = (alpha_index(e.child.pants), beta_index(e.child.pants));
        let (target, value) = match e.child.slot {
            0 => (a, c.inverse()),
            1 => (b, c.inverse()),
            _ => (b, Word::new(vec![Letter::new(a, true)]).mul(&c)),
        };
        eliminate(&mut subst, target, value);
    }

    let stable = |k: usize| Letter::new(2 * pants_count + k, false);
    let mut relators: Vec<Word> = hnn
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let t = Word::new(vec![stable(k)]);
            let w = t.mul(&slot_word(e.far)).mul(&t.inverse()).mul(&slot_word(e.near));
            expand(&w, &subst).cyclic_reduce()
        })
        .collect();

    while relators.len() > 1 {
        let found = relators.iter().enumerate().find_map(|(ri, r)| {
            single_occurrence(r, 2 * pants_count).map(|pos| (ri, pos))
        });
        let (ri, pos) = found.ok_or_else(|| Error::Presentation("no eliminable generator".into()))?;
        let r = relators.remove(ri);
        let letters = r.letters();
        let x = letters[pos];
        let u = Word::from(&letters[..pos]);
        let v = Word::from(&letters[pos + 1..]);
        let value = if x.is_inverse() { v.mul(&u) } else { u.inverse().mul(&v.inverse()) };
        let g = x.generator();
        eliminate(&mut subst, g, value.clone());
        for r in relators.iter_mut() {
            *r = substitute(r, g, &value).cyclic_reduce();
        }
    }
    let relator_original = relators.pop().unwrap_or_default();

    let basis: Vec<usize> = (0..total).filter(|&i| subst[i].is_none()).collect();
    if basis.len() != 2 * genus {
        return Err(Error::Presentation(format!("{} basis generators for genus {genus}", basis.len())));
    }
    let mut position = vec![usize::MAX; total];
    for (k, &g) in basis.iter().enumerate() {
        position[g] = k;
    }
    let rename = |w: &Word| {
        Word::new(w.letters().iter().map(|l| Letter::new(position[l.generator()], l.is_inverse())).collect())
    };
    let expressions: Vec<Word> = (0..total)
        .map(|i| match &subst[i] {
            Some(w) => rename(w),
            None => Word::new(vec![Letter::new(position[i], false)]),
        })
        .collect();
    let relator = rename(&relator_original);
    // Commutators follow the inverse relator so that the commutator Euler
    // class agrees in sign with the sum over pants.
    let standard = standard_generators(&relator.inverse(), genus)?;
    Ok(Presentation { pants_count, genus, tree, hnn, basis, expressions, relator, standard })
}

fn expand(w: &Word, subst: &[Option<Word>]) -> Word {
    let mut out = Vec::with_capacity(w.len());
    for l in w.letters() {
        match &subst[l.generator()] {
            Some(e) if l.is_inverse() => out.extend(e.inverse().letters().iter().copied()),
            Some(e) => out.extend(e.letters().iter().copied()),
            None => out.push(*l),
        }
    }
    Word::new(out).free_reduce()
}

fn substitute(w: &Word, g: usize, value: &Word) -> Word {
    let mut out = Vec::with_capacity(w.len());
    for l in w.letters() {
        if l.generator() == g {
            let v = if l.is_inverse() { value.inverse() } else { value.clone() };
            out.extend(v.letters().iter().copied());
        } else {
            out.push(*l);
        }
    }
    Word::new(out).free_reduce()
}

fn eliminate(subst: &mut [Option<Word>], g: usize, value: Word) {
    for s in subst.iter_mut().flatten() {
        *s = substitute(s, g, &value);
    }
    subst[g] = Some(value);
}

/// Position of a pants generator (index below `limit`) occurring exactly once.
fn single_occurrence(r: &Word, limit: usize) -> Option<usize> {
    let mut counts = std::collections::BTreeMap::new();
    for (i, l) in r.letters().iter().enumerate() {
        if l.generator() < limit {
            let e = counts.entry(l.generator()).or_insert((0usize, i));
            e.0 += 1;
        }
    }
    counts.into_values().find(|&(n, _)| n == 1).map(|(_, i)| i)
}

/// True when `u` and `v` are conjugate in the free group.
pub fn are_conjugate(u: &Word, v: &Word) -> bool {
    let (u, v) = (u.cyclic_reduce(), v.cyclic_reduce());
    if u.len() != v.len() {
        return false;
    }
    u.is_empty() || (0..u.len()).any(|k| u.rotate(k) == v)
}

fn conj(p: &Word, x: &Word) -> Word {
    // x⁻¹ p x
    x.inverse().mul(p).mul(x)
}

/// Cyclic reduction `w = y · r · y⁻¹`, returning `(r, y)`.
fn cyclic_reduce_with(w: &Word) -> (Word, Word) {
    let w = w.free_reduce();
    let l = w.letters();
    let (mut i, mut j) = (0, l.len());
    while j - i >= 2 && l[j - 1] == l[i].inverse() {
        i += 1;
        j -= 1;
    }
    (Word::from(&l[i..j]), Word::from(&l[..i]))
}

/// Rewrites an orientable quadratic relator as a product of commutators.
/// Returns `a₁, b₁, …, a_g, b_g` with `∏[aᵢ, bᵢ]` conjugate to `relator`.
pub fn standard_generators(relator: &Word, genus: usize) -> Result<Vec<Word>> {
    let mut pairs: Vec<(Word, Word)> = Vec::new();
    let (mut rem, _) = cyclic_reduce_with(relator);
    while !rem.is_empty() {
        let l = rem.letters().to_vec();
        let n = l.len();
        let partner = |i: usize| -> Result<usize> {
            let hits: Vec<usize> = (0..n).filter(|&k| k != i && l[k].generator() == l[i].generator()).collect();
            match hits.as_slice() {
                [k] if l[*k] == l[i].inverse() => Ok(*k),
                _ => Err(Error::Presentation(format!("relator {relator} is not orientable quadratic"))),
            }
        };
        let mut choice = None;
        'search: for i in 0..n {
            let k = partner(i)?;
            // Rotate so that i is at 0; positions measured from i.
            let kk = (k + n - i) % n;
            for jj in 1..kk {
                let j = (i + jj) % n;
                let ll = (partner(j)? + n - i) % n;
                if ll > kk {
                    choice = Some((i, jj, kk, ll));
                    break 'search;
                }
            }
        }
        let (i, j, k, m) = choice.ok_or_else(|| Error::Presentation(format!("no linked pair in {rem}")))?;
        let u = Word::from(&l[..i]);
        for p in pairs.iter_mut() {
            *p = (conj(&p.0, &u), conj(&p.1, &u));
        }
        let rot = rem.rotate(i);
        let r = rot.letters();
        let a = Word::from(&r[0..1]);
        let b = Word::from(&r[j..j + 1]);
        let p = Word::from(&r[1..j]);
        let q = Word::from(&r[j + 1..k]);
        let s = Word::from(&r[k + 1..m]);
        let t = Word::from(&r[m + 1..]);
        let x = s.mul(&q).mul(&p);
        for pr in pairs.iter_mut() {
            *pr = (conj(&pr.0, &x), conj(&pr.1, &x));
        }
        let w = x.inverse().mul(&a).mul(&p);
        let v = b.mul(&q).mul(&p);
        pairs.push((w, v));
        let (next, y) = cyclic_reduce_with(&t.mul(&x));
        for pr in pairs.iter_mut() {
            *pr = (conj(&pr.0, &y), conj(&pr.1, &y));
        }
        rem = next;
    }
    if pairs.len() != genus {
        return Err(Error::Presentation(format!("found {} handles, expected {genus}", pairs.len())));
    }
    let standard: Vec<Word> = pairs.into_iter().flat_map(|(a, b)| [a, b]).collect();
    let mut product = Word::empty();
    for pr in standard.chunks(2) {
        product = product.mul(&pr[0]).mul(&pr[1]).mul(&pr[0].inverse()).mul(&pr[1].inverse());
    }
    if !are_conjugate(&product, relator) {
        return Err(Error::Presentation(format!("commutator product {product} does not match {relator}")));
    }
    Ok(standard)
}
