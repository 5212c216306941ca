//! Length-spectrum ratios over enumerated words, cuff scalings, and
//! domination certificates.

use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::dd::DdMat;
use crate::error::{Error, Result};
use crate::folding::{fold_surface, prescribe_labeling, Labeling};
use crate::surface::{assemble_fuchsian, euler_class_surface, FNCoordinates, PantsDecomposition, SurfaceRep};
use crate::words::{default_word_cap, enumerate_words_capped, format_letters, Letter, WordList};

/// Words with `λ_j` below this are excluded from the ratios.
pub const DEGENERATE_LENGTH: f64 = 1e-9;

/// An excluded word whose `λ_ρ` reaches this violates domination.
pub const DEGENERATE_VIOLATION: f64 = 1e-6;

/// Margin below `1` that the sup ratio must clear.
pub const STRICT_MARGIN: f64 = 1e-9;

/// Relative gap below the largest ratio within which records tie.
pub const TIE_TOL: f64 = 1e-9;

const CHUNK: usize = 1 << 14;

/// Maximum word length and the cap on the number of enumerated words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBudget {
    pub max_len: usize,
    pub cap: usize,
}

impl WordBudget {
    /// Budget with the cap from the environment or the default.
    pub fn new(max_len: usize) -> Self {
        WordBudget { max_len, cap: default_word_cap() }
    }

    pub fn with_cap(self, cap: usize) -> Self {
        WordBudget { cap, ..self }
    }

    pub fn enumerate(&self, generators: usize) -> Result<WordList> {
        enumerate_words_capped(generators, self.max_len, self.cap)
    }
}

/// Lengths of one word under both representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRecord {
    /// Position in the word list.
    pub index: usize,
    pub lambda_j: f64,
    pub lambda_rho: f64,
    pub ratio: f64,
}

/// Ratios `λ_ρ / λ_j` over a word list.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub words: WordList,
    pub records: Vec<SpectrumRecord>,
    /// Words dropped because `λ_j` is degenerate.
    pub excluded: usize,
}

impl Spectrum {
    /// The largest ratio, NaN if any ratio is NaN.
    pub fn max_ratio(&self) -> Option<f64> {
        self.records.iter().map(|r| r.ratio).reduce(|a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
    }

    /// The earliest record (shortest word first) whose ratio equals the
    /// largest one up to rounding.
    pub fn witness(&self) -> Option<&SpectrumRecord> {
        let max = self.max_ratio()?;
        if max.is_nan() {
            return self.records.iter().find(|r| r.ratio.is_nan());
        }
        self.records.iter().find(|r| r.ratio >= max - TIE_TOL * max.abs())
    }

    pub fn word(&self, r: &SpectrumRecord) -> String {
        format_letters(self.words.get(r.index))
    }

    /// CSV with columns `word,lambda_j,lambda_rho,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,lambda_j,lambda_rho,ratio\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{:?},{:?},{:?}", self.word(r), r.lambda_j, r.lambda_rho, r.ratio);
        }
        out
    }
}

fn same_presentation(j: &SurfaceRep, rho: &SurfaceRep) -> bool {
    j.decomposition() == rho.decomposition() && j.presentation() == rho.presentation()
}

/// Translation lengths of every word, with products accumulated in
/// double-double and shared along common prefixes.
pub fn word_lengths(rep: &SurfaceRep, words: &WordList) -> Result<Vec<f64>> {
    if words.generators() != rep.generators().len() {
        return Err(Error::PresentationMismatch);
    }
    let table: Vec<DdMat> = rep
        .generators()
        .iter()
        .flat_map(|g| {
            let m = DdMat::from(*g);
            [m, m.adjugate()]
        })
        .collect();
    let image = |l: Letter| table[2 * l.generator() + l.is_inverse() as usize];
    let starts: Vec<usize> = (0..words.len()).step_by(CHUNK).collect();
    let chunks: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(words.len());
            let mut prefix: Vec<DdMat> = vec![DdMat::IDENTITY];
            let mut current: Vec<Letter> = Vec::new();
            let mut out = Vec::with_capacity(end - start);
            for i in start..end {
                let w = words.get(i);
                let shared = current.iter().zip(w).take_while(|(a, b)| a == b).count();
                prefix.truncate(shared + 1);
                current.truncate(shared);
                for &l in &w[shared..] {
                    let next = prefix[prefix.len() - 1] * image(l);
                    prefix.push(next);
                    current.push(l);
                }
                out.push(prefix[w.len()].translation_length());
            }
            out
        })
        .collect();
    Ok(chunks.concat())
}

/// Per-word lengths and ratios. Words with `λ_j < 1e−9` are excluded and
/// counted; such a word with `λ_ρ ≥ 1e−6` is an error.
pub fn ratio_spectrum(j: &SurfaceRep, rho: &SurfaceRep, words: WordList) -> Result<Spectrum> {
    if !same_presentation(j, rho) {
        return Err(Error::PresentationMismatch);
    }
    let lj = word_lengths(j, &words)?;
    let lr = word_lengths(rho, &words)?;
    let mut records = Vec::with_capacity(words.len());
    let mut excluded = 0;
    for (index, (&lambda_j, &lambda_rho)) in lj.iter().zip(&lr).enumerate() {
        if lambda_j < DEGENERATE_LENGTH {
            if lambda_rho >= DEGENERATE_VIOLATION {
                return Err(Error::DegenerateViolation { word: format_letters(words.get(index)), lambda_rho });
            }
            excluded += 1;
            continue;
        }
        records.push(SpectrumRecord { index, lambda_j, lambda_rho, ratio: lambda_rho / lambda_j });
    }
    Ok(Spectrum { words, records, excluded })
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::BadParameter(format!("t must lie in [0, 1), got {t}")));
    }
    Ok(())
}

fn scale_lengths(fnc: &FNCoordinates, factor: f64) -> Result<FNCoordinates> {
    FNCoordinates::new(fnc.lengths.iter().map(|l| l * factor).collect(), fnc.twists.clone())
}

/// Every cuff length multiplied by `1 − t`.
pub fn cuff_shrink(fnc: &FNCoordinates, t: f64) -> Result<FNCoordinates> {
    check_t(t)?;
    scale_lengths(fnc, 1.0 - t)
}

/// Every cuff length divided by `1 − t`.
pub fn cuff_lengthen(fnc: &FNCoordinates, t: f64) -> Result<FNCoordinates> {
    check_t(t)?;
    scale_lengths(fnc, 1.0 / (1.0 - t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    StrictlyDominated,
    NotCertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StrictlyDominated => "StrictlyDominated",
            Verdict::NotCertified => "NotCertified",
        })
    }
}

/// Outcome of a finite domination probe.
#[derive(Debug, Clone)]
pub struct DominationCertificate {
    pub verdict: Verdict,
    pub sup_ratio: f64,
    pub witness: String,
    pub t: f64,
    pub budget: WordBudget,
    pub euler_rho: i64,
    pub spectrum: Spectrum,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CertificateJson<'a> {
    verdict: Verdict,
    sup_ratio: f64,
    witness: &'a str,
    t: f64,
    max_word_len: usize,
    euler_rho: i64,
    excluded_words: usize,
}

impl DominationCertificate {
    fn from_spectrum(spectrum: Spectrum, t: f64, budget: WordBudget, euler_rho: i64) -> Result<Self> {
        let sup_ratio = spectrum.max_ratio().ok_or_else(|| Error::BadParameter("no words to certify".into()))?;
        let best = *spectrum.witness().expect("records are nonempty");
        let strict = spectrum.records.iter().all(|r| r.ratio < 1.0 - STRICT_MARGIN);
        let verdict = if strict && sup_ratio < 1.0 - STRICT_MARGIN {
            Verdict::StrictlyDominated
        } else {
            Verdict::NotCertified
        };
        Ok(DominationCertificate {
            verdict,
            sup_ratio,
            witness: spectrum.word(&best),
            t,
            budget,
            euler_rho,
            spectrum,
        })
    }

    pub fn to_json(&self) -> String {
        let view = CertificateJson {
            verdict: self.verdict,
            sup_ratio: self.sup_ratio,
            witness: &self.witness,
            t: self.t,
            max_word_len: self.budget.max_len,
            euler_rho: self.euler_rho,
            excluded_words: self.spectrum.excluded,
        };
        serde_json::to_string_pretty(&view).expect("plain data serializes")
    }
}

/// Compares `j = assemble(fn)` with the folding of the shrunk assembly along
/// a labeling of Euler class `k`.
pub fn strictly_dominated_fold(
    pd: &PantsDecomposition,
    fnc: &FNCoordinates,
    k: i64,
    t: f64,
    budget: WordBudget,
) -> Result<DominationCertificate> {
    check_t(t)?;
    let labels = prescribe_labeling(pd, k)?;
    let j = assemble_fuchsian(pd, fnc)?;
    let (_, rho) = fold_surface(pd, &cuff_shrink(fnc, t)?, &labels)?;
    certify(&j, &rho, t, budget)
}

/// Compares the folding `ρ` of `assemble(fn)` with the lengthened assembly.
pub fn dominating_fuchsian(
    pd: &PantsDecomposition,
    fnc: &FNCoordinates,
    labels: &Labeling,
    t: f64,
    budget: WordBudget,
) -> Result<DominationCertificate> {
    check_t(t)?;
    if labels.is_fuchsian() {
        return Err(Error::FuchsianLabeling);
    }
    let (_, rho) = fold_surface(pd, fnc, labels)?;
    let j = assemble_fuchsian(pd, &cuff_lengthen(fnc, t)?)?;
    certify(&j, &rho, t, budget)
}

/// Certificate for a given pair.
pub fn certify(j: &SurfaceRep, rho: &SurfaceRep, t: f64, budget: WordBudget) -> Result<DominationCertificate> {
    if !same_presentation(j, rho) {
        return Err(Error::PresentationMismatch);
    }
    let words = budget.enumerate(j.generators().len())?;
    let spectrum = ratio_spectrum(j, rho, words)?;
    DominationCertificate::from_spectrum(spectrum, t, budget, euler_class_surface(rho)?)
}
