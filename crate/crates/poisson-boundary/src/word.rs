//! Words over the alphabet `{1..d}` and the weight vector `ω`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{parse_err, Error, Result};
use crate::scalar::{Mode, Real};

/// Largest supported alphabet; letters serialize as single digits.
pub const MAX_D: usize = 9;

/// A finite word. Ordered by length first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, checking every letter against the alphabet size `d`.
    pub fn new(letters: &[u8], d: usize) -> Result<Self> {
        let w = Word(letters.to_vec());
        w.check_alphabet(d)?;
        Ok(w)
    }

    /// Builds a word without an alphabet check. Letters must still be at least 1.
    pub fn from_letters(letters: &[u8]) -> Self {
        debug_assert!(letters.iter().all(|&l| l >= 1));
        Word(letters.to_vec())
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn check_alphabet(&self, d: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > d) {
            Some(l) => Err(Error::Domain(format!("letter {l} outside [1, {d}] in word {self}"))),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// Juxtaposition `IJ`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `I^op`.
    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// The prefix `I_m` of length `m` (clamped to the word length).
    pub fn prefix(&self, m: usize) -> Word {
        Word(self.0[..m.min(self.len())].to_vec())
    }

    pub fn prepend(&self, i: u8) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn append(&self, i: u8) -> Word {
        let mut v = self.0.clone();
        v.push(i);
        Word(v)
    }

    /// Returns `K` when `self = prefix · K`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| Word(s.to_vec()))
    }

    /// Returns `K` when `self = K · suffix`.
    pub fn strip_suffix(&self, suffix: &Word) -> Option<Word> {
        self.0.strip_suffix(suffix.0.as_slice()).map(|s| Word(s.to_vec()))
    }

    /// `I^n`.
    pub fn repeat(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    /// All words of length exactly `n` in lexicographic order.
    pub fn all_of_length(d: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * d);
            for w in &out {
                for i in 1..=d as u8 {
                    next.push(w.append(i));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length `≤ n` in basis order.
    pub fn all_up_to(d: usize, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|k| Word::all_of_length(d, k)).collect()
    }

    /// Parses a digit string; `""` and `"()"` both denote the empty word.
    pub fn parse(s: &str, d: usize) -> Result<Word> {
        let t = s.trim();
        if t.is_empty() || t == "()" {
            return Ok(Word::empty());
        }
        let mut v = Vec::with_capacity(t.len());
        for ch in t.chars() {
            let digit = ch
                .to_digit(10)
                .ok_or_else(|| parse_err(s, "words are digit strings"))?;
            v.push(digit as u8);
        }
        let w = Word(v);
        w.check_alphabet(d)
            .map_err(|e| parse_err(s, e.to_string()))?;
        Ok(w)
    }

    /// Serialization form: the bare digit string.
    pub fn to_digits(&self) -> String {
        self.0.iter().map(|l| char::from(b'0' + l)).collect()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("()")
        } else {
            f.write_str(&self.to_digits())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_digits())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s, MAX_D).map_err(serde::de::Error::custom)
    }
}

/// `concat(I, J)`.
pub fn word_concat(i: &Word, j: &Word) -> Word {
    i.concat(j)
}

/// `I^op`.
pub fn word_reverse(i: &Word) -> Word {
    i.reverse()
}

/// `ω_I`, with `ω_() = 1`.
pub fn word_weight<R: Real>(i: &Word, w: &WeightVector<R>) -> Result<R> {
    i.check_alphabet(w.d())?;
    Ok(w.word_weight(i))
}

/// Strictly positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<R: Real> {
    values: Vec<R>,
    /// Integer coefficients (constant term first) of a polynomial the classifying
    /// generator is expected to satisfy; float mode only.
    min_poly: Option<Vec<i64>>,
}

impl<R: Real> WeightVector<R> {
    pub fn new(values: Vec<R>) -> Result<Self> {
        let d = values.len();
        if d < 2 {
            return Err(Error::InvalidWeights(format!("need d >= 2, got {d}")));
        }
        if d > MAX_D {
            return Err(Error::InvalidWeights(format!("d = {d} exceeds the supported maximum {MAX_D}")));
        }
        for (k, v) in values.iter().enumerate() {
            if !(v.is_positive() && *v < R::one()) {
                return Err(Error::InvalidWeights(format!(
                    "weight {} = {} is not in (0, 1)",
                    k + 1,
                    v.to_repr()
                )));
            }
        }
        let total = values.iter().fold(R::zero(), |acc, v| acc.add(v));
        let ok = match R::MODE {
            Mode::Exact => total == R::one(),
            Mode::Float => (total.to_f64() - 1.0).abs() <= 1e-12,
        };
        if !ok {
            return Err(Error::InvalidWeights(format!("weights sum to {}, not 1", total.to_repr())));
        }
        Ok(WeightVector { values, min_poly: None })
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![R::from_ratio(1, d as i64); d])
    }

    /// Parses a comma-separated list such as `1/3,2/3`.
    pub fn parse(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|p| R::parse_repr(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn with_min_poly(mut self, coeffs: Vec<i64>) -> Self {
        self.min_poly = Some(coeffs);
        self
    }

    pub fn min_poly(&self) -> Option<&[i64]> {
        self.min_poly.as_deref()
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    /// `ω_i` for a letter `i ∈ [1, d]`.
    pub fn get(&self, i: u8) -> &R {
        &self.values[i as usize - 1]
    }

    /// `ω_I = ∏ ω_{i_t}`.
    pub fn word_weight(&self, w: &Word) -> R {
        w.letters()
            .iter()
            .fold(R::one(), |acc, &l| acc.mul(self.get(l)))
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|v| v.approx_eq(&self.values[0]))
    }

    pub fn mode(&self) -> Mode {
        R::MODE
    }

    pub fn to_repr(&self) -> Vec<String> {
        self.values.iter().map(Real::to_repr).collect()
    }
}
