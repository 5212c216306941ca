//! Words in a free group and enumeration of conjugacy-class representatives.
//!
//! Generator `i` prints as the `i`-th lowercase letter and its inverse as the
//! uppercase letter. A letter code is `2·i` for the generator and `2·i + 1`
//! for its inverse, so `a < A < b < B < …` in the canonical order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const DEFAULT_WORD_CAP: usize = 10_000_000;

/// Environment variable overriding [`DEFAULT_WORD_CAP`].
pub const WORD_CAP_ENV: &str = "FOLDREP_WORD_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator < 128, "generator index {generator} out of range");
        Letter((2 * generator + inverse as usize) as u8)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c.is_ascii_lowercase() {
            Some(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Some(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            None
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.generator();
        if g < 26 {
            let base = if self.is_inverse() { b'A' } else { b'a' };
            write!(f, "{}", (base + g as u8) as char)
        } else if self.is_inverse() {
            write!(f, "[{g}^-1]")
        } else {
            write!(f, "[{g}]")
        }
    }
}

/// A finite sequence of letters. No reduction is implied by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Word {
        Word(vec![Letter::new(i, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).free_reduce()
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(f), Some(l)) => self.0.len() == 1 || *l != f.inverse(),
                _ => true,
            }
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn cyclic_reduce(&self) -> Word {
        let w = self.free_reduce().0;
        let (mut i, mut j) = (0, w.len());
        while j - i >= 2 && w[j - 1] == w[i].inverse() {
            i += 1;
            j -= 1;
        }
        Word(w[i..j].to_vec())
    }

    /// Rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        let n = self.0.len();
        if n == 0 {
            return Word::empty();
        }
        Word((0..n).map(|i| self.0[(i + k) % n]).collect())
    }

    /// Lexicographically smallest rotation of the word or of its inverse.
    /// Two cyclically reduced words are conjugate up to inversion iff their
    /// canonical forms coincide.
    pub fn canonical(&self) -> Word {
        let w = self.cyclic_reduce();
        let inv = w.inverse();
        (0..w.len())
            .flat_map(|k| [w.rotate(k), inv.rotate(k)])
            .min()
            .unwrap_or_default()
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut sums = vec![0; generators];
        for l in &self.0 {
            sums[l.generator()] += if l.is_inverse() { -1 } else { 1 };
        }
        sums
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Format(format!("bad letter {c:?} in word {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

pub fn format_letters(letters: &[Letter]) -> String {
    Word::from(letters).to_string()
}

/// Cyclically reduced words up to rotation and inversion, stored in a flat
/// arena. Words are ordered by length, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    generators: usize,
    max_len: usize,
    letters: Vec<Letter>,
    offsets: Vec<u32>,
}

impl WordList {
    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> &[Letter] {
        &self.letters[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn word(&self, i: usize) -> Word {
        Word::from(self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Letter]> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Enumeration budget: `FOLDREP_WORD_CAP` if set and valid, else the default.
pub fn default_word_cap() -> usize {
    std::env::var(WORD_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_WORD_CAP)
}

pub fn enumerate_words(generators: usize, max_len: usize) -> Result<WordList> {
    enumerate_words_capped(generators, max_len, default_word_cap())
}

pub fn enumerate_words_capped(generators: usize, max_len: usize, cap: usize) -> Result<WordList> {
    if generators == 0 || generators > 64 {
        return Err(Error::BadParameter(format!("generator count {generators}")));
    }
    if max_len == 0 {
        return Err(Error::BadParameter("maximum word length must be positive".into()));
    }
    let mut out = WordList { generators, max_len, letters: Vec::new(), offsets: vec![0] };
    let alphabet: Vec<Letter> = (0..2 * generators).map(|c| Letter(c as u8)).collect();
    let mut buf = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        for &first in &alphabet {
            if first.inverse() < first {
                continue;
            }
            buf.clear();
            buf.push(first);
            extend(&mut buf, len, &alphabet, &mut out, cap)?;
        }
    }
    Ok(out)
}

fn extend(buf: &mut Vec<Letter>, len: usize, alphabet: &[Letter], out: &mut WordList, cap: usize) -> Result<()> {
    let first = buf[0];
    if buf.len() == len {
        if (len == 1 || buf[len - 1] != first.inverse()) && is_canonical(buf) {
            if out.len() >= cap {
                return Err(Error::BudgetExceeded(cap));
            }
            out.letters.extend_from_slice(buf);
            out.offsets.push(out.letters.len() as u32);
        }
        return Ok(());
    }
    let prev = buf[buf.len() - 1];
    for &l in alphabet {
        if l < first || l.inverse() < first || l == prev.inverse() {
            continue;
        }
        buf.push(l);
        extend(buf, len, alphabet, out, cap)?;
        buf.pop();
    }
    Ok(())
}

/// True when `w` is no larger than any rotation of itself or its inverse.
fn is_canonical(w: &[Letter]) -> bool {
    let n = w.len();
    for k in 1..n {
        if cmp_rotation(w, |i| w[(i + k) % n]) == std::cmp::Ordering::Greater {
            return false;
        }
    }
    for k in 0..n {
        // Inverse rotated by k: letter i is inverse of w[n-1-((i+k)%n)].
        if cmp_rotation(w, |i| w[n - 1 - (i + k) % n].inverse()) == std::cmp::Ordering::Greater {
            return false;
        }
    }
    true
}

fn cmp_rotation(w: &[Letter], other: impl Fn(usize) -> Letter) -> std::cmp::Ordering {
    for (i, &l) in w.iter().enumerate() {
        match l.cmp(&other(i)) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}
