//! The full Fock space truncated at a cut `N` (words of length `≤ N`), creation and
//! annihilation operators, the vacuum projection and the Markov operator `P_ω`.
//!
//! A [`TruncatedOperator`] stores the compression of an operator to the degree-`≤ N`
//! subspace. Besides the cut it records an *exact block*: the largest degree `e` such
//! that every entry with row and column length `≤ e` equals the matrix entry of the
//! untruncated operator. Generators and realizations of algebra elements are exact on the
//! whole cut; products and Markov steps shrink the block as documented on each method.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{coeff_repr, parse_coeff, Field, Mode, Scalar};
use crate::word::{WeightVector, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Creation,
    Annihilation,
}

/// A single creation, annihilation or vacuum-projection operator acting on basis words of
/// the untruncated Fock space. Each maps a basis vector to a basis vector or to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Op(Side, Kind, u8),
    Vacuum,
}

impl Elementary {
    pub fn apply(&self, w: &Word) -> Option<Word> {
        match *self {
            Elementary::Op(Side::Left, Kind::Creation, i) => Some(w.prepend(i)),
            Elementary::Op(Side::Right, Kind::Creation, i) => Some(w.append(i)),
            Elementary::Op(Side::Left, Kind::Annihilation, i) => {
                (w.first() == Some(i)).then(|| Word::from_letters(&w.letters()[1..]))
            }
            Elementary::Op(Side::Right, Kind::Annihilation, i) => {
                (w.last() == Some(i)).then(|| Word::from_letters(&w.letters()[..w.len() - 1]))
            }
            Elementary::Vacuum => w.is_empty().then(Word::empty),
        }
    }

    /// Degree change `|output| − |input|`.
    pub fn shift(&self) -> i64 {
        match self {
            Elementary::Op(_, Kind::Creation, _) => 1,
            Elementary::Op(_, Kind::Annihilation, _) => -1,
            Elementary::Vacuum => 0,
        }
    }
}

/// Applies the product `ops[0] ops[1] … ops[n−1]` (rightmost first) to a basis word.
pub fn apply_product(ops: &[Elementary], w: &Word) -> Option<Word> {
    ops.iter().rev().try_fold(w.clone(), |acc, op| op.apply(&acc))
}

/// The operator word for `l_K`, `r_K`, `l_K*` or `r_K*`, with `X_K = X_{k_1} ⋯ X_{k_m}`
/// and `X_K* = X_{k_m}* ⋯ X_{k_1}*`.
pub fn word_ops(side: Side, kind: Kind, k: &Word) -> Vec<Elementary> {
    let ops = k.letters().iter().map(|&i| Elementary::Op(side, kind, i));
    match kind {
        Kind::Creation => ops.collect(),
        Kind::Annihilation => ops.rev().collect(),
    }
}

/// Sparse vector in the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<S: Scalar> {
    d: usize,
    cut: usize,
    amps: BTreeMap<Word, S>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zero(d: usize, cut: usize) -> Self {
        FockVector { d, cut, amps: BTreeMap::new() }
    }

    /// `e_I`; errors if the word is longer than the cut.
    pub fn basis(d: usize, cut: usize, w: &Word) -> Result<Self> {
        w.check_alphabet(d)?;
        if w.len() > cut {
            return Err(Error::Domain(format!("word {w} exceeds cut {cut}")));
        }
        let mut v = Self::zero(d, cut);
        v.amps.insert(w.clone(), S::one());
        Ok(v)
    }

    /// `Ω = e_()`.
    pub fn vacuum(d: usize, cut: usize) -> Self {
        let mut v = Self::zero(d, cut);
        v.amps.insert(Word::empty(), S::one());
        v
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn get(&self, w: &Word) -> S {
        self.amps.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.amps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Adds `c·e_w`, silently dropping words beyond the cut.
    pub fn add_term(&mut self, w: Word, c: S) {
        if w.len() > self.cut {
            return;
        }
        accumulate(&mut self.amps, w, c);
    }

    fn map_words(&self, op: Elementary) -> Self {
        let mut out = Self::zero(self.d, self.cut);
        for (w, c) in &self.amps {
            if let Some(img) = op.apply(w) {
                out.add_term(img, c.clone());
            }
        }
        out
    }
}

fn accumulate<K: Ord, S: Scalar>(map: &mut BTreeMap<K, S>, key: K, c: S) {
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            let s = e.get().add(&c);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

fn check_letter(i: u8, d: usize) -> Result<()> {
    if i == 0 || i as usize > d {
        return Err(Error::Domain(format!("letter {i} outside [1, {d}]")));
    }
    Ok(())
}

/// Left (`e_J ↦ e_{iJ}`) or right (`e_J ↦ e_{Ji}`) creation. Terms that would leave the
/// cut are dropped (compression).
pub fn apply_creation<S: Scalar>(side: Side, i: u8, v: &FockVector<S>) -> Result<FockVector<S>> {
    check_letter(i, v.d)?;
    Ok(v.map_words(Elementary::Op(side, Kind::Creation, i)))
}

/// Left annihilation removes a leading `i` and kills everything else, including `Ω`;
/// right annihilation acts at the tail.
pub fn apply_annihilation<S: Scalar>(side: Side, i: u8, v: &FockVector<S>) -> Result<FockVector<S>> {
    check_letter(i, v.d)?;
    Ok(v.map_words(Elementary::Op(side, Kind::Annihilation, i)))
}

/// Keeps only the `Ω` amplitude.
pub fn apply_vacuum_projection<S: Scalar>(v: &FockVector<S>) -> FockVector<S> {
    v.map_words(Elementary::Vacuum)
}

type Entries<S> = BTreeMap<(Word, Word), S>;

/// Compression of an operator on the full Fock space to words of length `≤ cut`.
/// Entry `(I, J)` holds `⟨x e_J, e_I⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator<S: Scalar> {
    d: usize,
    cut: usize,
    exact: Option<usize>,
    /// Bounds on `|row| − |col|` over the nonzero entries of the untruncated operator.
    shift: (i64, i64),
    entries: Entries<S>,
}

impl<S: Scalar> TruncatedOperator<S> {
    pub fn zero(d: usize, cut: usize) -> Self {
        TruncatedOperator {
            d,
            cut,
            exact: Some(cut),
            shift: (0, 0),
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(d: usize, cut: usize) -> Self {
        Self::from_basis_map(d, cut, (0, 0), |w| vec![(w.clone(), S::one())])
    }

    /// Builds the compression of an operator given by its exact action on basis vectors.
    /// `image(B)` lists `(A, c)` with `x e_B = Σ c e_A`; `shift` must bound `|A| − |B|`.
    pub fn from_basis_map<F>(d: usize, cut: usize, shift: (i64, i64), image: F) -> Self
    where
        F: Fn(&Word) -> Vec<(Word, S)>,
    {
        let mut entries = BTreeMap::new();
        for col in Word::all_up_to(d, cut) {
            for (row, c) in image(&col) {
                if row.len() <= cut {
                    accumulate(&mut entries, (row, col.clone()), c);
                }
            }
        }
        TruncatedOperator { d, cut, exact: Some(cut), shift, entries }
    }

    /// Compression of the operator product `ops[0] ⋯ ops[n−1]`.
    pub fn from_product(d: usize, cut: usize, ops: &[Elementary]) -> Self {
        let s: i64 = ops.iter().map(Elementary::shift).sum();
        Self::from_basis_map(d, cut, (s, s), |w| {
            apply_product(ops, w).map(|r| (r, S::one())).into_iter().collect()
        })
    }

    /// Wraps raw entries (e.g. imported from JSON). The exact block is the whole cut and the
    /// shift bounds are read off the entries.
    pub fn from_entries(d: usize, cut: usize, raw: Vec<(Word, Word, S)>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (r, c, v) in raw {
            r.check_alphabet(d)?;
            c.check_alphabet(d)?;
            if r.len() > cut || c.len() > cut {
                return Err(Error::Domain(format!("entry ({r}, {c}) exceeds cut {cut}")));
            }
            accumulate(&mut entries, (r, c), v);
        }
        let shift = shift_of(&entries);
        Ok(TruncatedOperator { d, cut, exact: Some(cut), shift, entries })
    }

    pub(crate) fn from_parts(d: usize, cut: usize, exact: Option<usize>, shift: (i64, i64), raw: Vec<(Word, Word, S)>) -> Self {
        let mut entries = BTreeMap::new();
        for (r, c, v) in raw {
            if r.len() <= cut && c.len() <= cut {
                accumulate(&mut entries, (r, c), v);
            }
        }
        TruncatedOperator { d, cut, exact, shift, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    /// Largest degree on which entries are exact, if any.
    pub fn exact_block(&self) -> Option<usize> {
        self.exact
    }

    pub fn shift_bounds(&self) -> (i64, i64) {
        self.shift
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: &Word, col: &Word) -> S {
        self.entries
            .get(&(row.clone(), col.clone()))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &Word, &S)> {
        self.entries.iter().map(|((r, c), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Replaces the recorded exact block (e.g. after an external argument shows more is exact).
    pub fn with_exact_block(mut self, exact: Option<usize>) -> Self {
        self.exact = exact.map(|e| e.min(self.cut));
        self
    }

    pub fn apply(&self, v: &FockVector<S>) -> Result<FockVector<S>> {
        if v.cut != self.cut {
            return Err(Error::Contract(format!("vector cut {} vs operator cut {}", v.cut, self.cut)));
        }
        let mut out = FockVector::zero(self.d, self.cut);
        for ((r, c), x) in &self.entries {
            if let Some(a) = v.amps.get(c) {
                out.add_term(r.clone(), x.mul(a));
            }
        }
        Ok(out)
    }

    fn same_frame(&self, other: &Self, what: &str) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Contract(format!("{what}: alphabet sizes {} and {} differ", self.d, other.d)));
        }
        if self.cut != other.cut {
            return Err(Error::Contract(format!(
                "{what}: cuts {} and {} differ; re-cut explicitly first",
                self.cut, other.cut
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_frame(other, "add")?;
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            accumulate(&mut entries, k.clone(), v.clone());
        }
        Ok(TruncatedOperator {
            d: self.d,
            cut: self.cut,
            exact: min_opt(self.exact, other.exact),
            shift: union_shift(self, other),
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&S::one().neg()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = self.clone();
        out.entries = BTreeMap::new();
        for (k, v) in &self.entries {
            accumulate(&mut out.entries, k.clone(), v.mul(c));
        }
        out
    }

    /// Sparse product at the common cut. With `e = min(exact(x), exact(y))`, the result is
    /// exact on degree `e − max(0, min(up(y), −down(x)))`, since every intermediate word that
    /// can contribute there stays inside the exact blocks.
    pub fn compose(&self, y: &Self) -> Result<Self> {
        self.same_frame(y, "compose")?;
        let mut by_col: HashMap<&Word, Vec<(&Word, &S)>> = HashMap::new();
        for ((r, c), v) in &self.entries {
            by_col.entry(c).or_default().push((r, v));
        }
        let mut entries = BTreeMap::new();
        for ((mid, col), yv) in &y.entries {
            if let Some(rows) = by_col.get(mid) {
                for (row, xv) in rows {
                    accumulate(&mut entries, ((*row).clone(), col.clone()), xv.mul(yv));
                }
            }
        }
        let margin = (y.shift.1).min(-self.shift.0).max(0);
        let exact = min_opt(self.exact, y.exact).and_then(|e| sub_nonneg(e, margin));
        Ok(TruncatedOperator {
            d: self.d,
            cut: self.cut,
            exact,
            shift: (self.shift.0 + y.shift.0, self.shift.1 + y.shift.1),
            entries,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|((r, c), v)| ((c.clone(), r.clone()), v.conj()))
            .collect();
        TruncatedOperator {
            d: self.d,
            cut: self.cut,
            exact: self.exact,
            shift: (-self.shift.1, -self.shift.0),
            entries,
        }
    }

    /// Restricts to words of length `≤ n` (explicit re-cut).
    pub fn recut(&self, n: usize) -> Result<Self> {
        if n > self.cut {
            return Err(Error::Contract(format!("cannot re-cut from {} up to {n}", self.cut)));
        }
        let entries = self
            .entries
            .iter()
            .filter(|((r, c), _)| r.len() <= n && c.len() <= n)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(TruncatedOperator {
            d: self.d,
            cut: n,
            exact: self.exact.map(|e| e.min(n)),
            shift: self.shift,
            entries,
        })
    }

    /// Entries with row and column length `≤ block`.
    pub fn block_entries(&self, block: usize) -> impl Iterator<Item = (&Word, &Word, &S)> {
        self.entries().filter(move |(r, c, _)| r.len() <= block && c.len() <= block)
    }

    /// Compares two operators entrywise on the degree-`≤ block` corner. Returns whether they
    /// agree (exactly, or within tolerance in float mode) and the largest entry deviation.
    pub fn compare_on_block(&self, other: &Self, block: usize) -> (bool, f64) {
        let mut agree = true;
        let mut max = 0.0f64;
        let mut visit = |a: S, b: S| {
            let diff = a.sub(&b);
            if !diff.is_zero() {
                agree = false;
            }
            max = max.max(diff.to_c64().norm());
        };
        for (r, c, v) in self.block_entries(block) {
            visit(v.clone(), other.get(r, c));
        }
        for (r, c, v) in other.block_entries(block) {
            if !self.entries.contains_key(&(r.clone(), c.clone())) {
                visit(S::zero(), v.clone());
            }
        }
        (agree, max)
    }

    /// Largest absolute entry; a lower bound for the operator norm.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.values().map(|v| v.to_c64().norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm; an upper bound for the operator norm of the compression.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .values()
            .fold(0.0, |acc, v| acc + v.to_c64().norm_sqr())
            .sqrt()
    }

    pub fn to_json(&self) -> OperatorJson
    where
        S: Field,
    {
        OperatorJson {
            d: self.d,
            cut: self.cut,
            mode: S::MODE,
            entries: self
                .entries
                .iter()
                .map(|((r, c), v)| {
                    let repr = coeff_repr(v);
                    EntryJson { row: r.clone(), col: c.clone(), re: repr.re, im: repr.im }
                })
                .collect(),
        }
    }

    pub fn from_json(j: &OperatorJson) -> Result<Self>
    where
        S: Field,
    {
        if j.mode != S::MODE {
            return Err(Error::Contract(format!("operator is in {} mode, session is {}", j.mode, S::MODE)));
        }
        let raw = j
            .entries
            .iter()
            .enumerate()
            .map(|(k, e)| {
                parse_coeff::<S>(&e.re, &e.im)
                    .map(|c| (e.row.clone(), e.col.clone(), c))
                    .map_err(|err| crate::error::parse_err(format!("entries[{k}]"), err.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(j.d, j.cut, raw)
    }
}

fn shift_of<S>(entries: &Entries<S>) -> (i64, i64) {
    let mut it = entries.keys().map(|(r, c)| r.len() as i64 - c.len() as i64);
    match it.next() {
        None => (0, 0),
        Some(first) => it.fold((first, first), |(lo, hi), s| (lo.min(s), hi.max(s))),
    }
}

fn union_shift<S: Scalar>(x: &TruncatedOperator<S>, y: &TruncatedOperator<S>) -> (i64, i64) {
    match (x.is_zero(), y.is_zero()) {
        (true, _) => y.shift,
        (_, true) => x.shift,
        _ => (x.shift.0.min(y.shift.0), x.shift.1.max(y.shift.1)),
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => None,
    }
}

fn sub_nonneg(e: usize, m: i64) -> Option<usize> {
    let v = e as i64 - m;
    (v >= 0).then_some(v as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub row: Word,
    pub col: Word,
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub d: usize,
    pub cut: usize,
    pub mode: Mode,
    pub entries: Vec<EntryJson>,
}

/// `l_i`, `r_i`, `l_i*` or `r_i*` compressed to the cut.
pub fn build_generator<S: Scalar>(side: Side, kind: Kind, i: u8, d: usize, cut: usize) -> Result<TruncatedOperator<S>> {
    check_letter(i, d)?;
    Ok(TruncatedOperator::from_product(d, cut, &[Elementary::Op(side, kind, i)]))
}

/// `l_K`, `r_K`, `l_K*` or `r_K*` for a word `K`.
pub fn build_word_operator<S: Scalar>(side: Side, kind: Kind, k: &Word, d: usize, cut: usize) -> Result<TruncatedOperator<S>> {
    k.check_alphabet(d)?;
    Ok(TruncatedOperator::from_product(d, cut, &word_ops(side, kind, k)))
}

/// `p_Ω`.
pub fn build_vacuum_projection<S: Scalar>(d: usize, cut: usize) -> TruncatedOperator<S> {
    TruncatedOperator::from_product(d, cut, &[Elementary::Vacuum])
}

pub fn compose<S: Scalar>(x: &TruncatedOperator<S>, y: &TruncatedOperator<S>) -> Result<TruncatedOperator<S>> {
    x.compose(y)
}

pub fn adjoint<S: Scalar>(x: &TruncatedOperator<S>) -> TruncatedOperator<S> {
    x.adjoint()
}

fn check_weights<S: Scalar>(x: &TruncatedOperator<S>, w: &WeightVector<S::Real>) -> Result<()> {
    if w.d() != x.d {
        return Err(Error::Contract(format!("weights have d = {}, operator has d = {}", w.d(), x.d)));
    }
    Ok(())
}

/// `P_ω(x) = Σ_i ω_i l_i* x l_i` at cut `N − 1`, via
/// `⟨P(x) e_J, e_I⟩ = Σ_i ω_i ⟨x e_{iJ}, e_{iI}⟩`. The exact block shrinks by one.
pub fn markov_step<S: Scalar>(x: &TruncatedOperator<S>, w: &WeightVector<S::Real>) -> Result<TruncatedOperator<S>> {
    check_weights(x, w)?;
    if x.cut == 0 {
        return Err(Error::CutExhausted("Markov step needs cut >= 1".into()));
    }
    let mut entries = BTreeMap::new();
    for ((r, c), v) in &x.entries {
        if let (Some(a), Some(b)) = (r.first(), c.first()) {
            if a == b {
                let key = (
                    Word::from_letters(&r.letters()[1..]),
                    Word::from_letters(&c.letters()[1..]),
                );
                accumulate(&mut entries, key, v.scale(w.get(a)));
            }
        }
    }
    Ok(TruncatedOperator {
        d: x.d,
        cut: x.cut - 1,
        exact: x.exact.and_then(|e| e.checked_sub(1)),
        shift: x.shift,
        entries,
    })
}

/// One violated harmonicity identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicDefect {
    pub row: Word,
    pub col: Word,
    /// `⟨x e_J, e_I⟩`.
    pub value: Complex64,
    /// `Σ_i ω_i ⟨x e_{iJ}, e_{iI}⟩`.
    pub markov_value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityReport {
    /// Entries with row and column length `≤ block` were checked; all others hold trivially
    /// or lie outside the exact block.
    pub block: Option<usize>,
    pub checked_nonzero: usize,
    pub defects: Vec<HarmonicDefect>,
}

impl HarmonicityReport {
    pub fn is_harmonic(&self) -> bool {
        self.block.is_some() && self.defects.is_empty()
    }
}

/// Checks `⟨x e_J, e_I⟩ = Σ_i ω_i ⟨x e_{iJ}, e_{iI}⟩` for every `(I, J)` with both lengths at
/// most `min(cut, exact) − 1`. Pairs where both sides vanish are not listed.
pub fn is_harmonic<S: Scalar>(x: &TruncatedOperator<S>, w: &WeightVector<S::Real>) -> Result<HarmonicityReport> {
    let p = markov_step(x, w)?;
    let block = p.exact;
    let mut defects = Vec::new();
    let mut checked = 0;
    if let Some(b) = block {
        let mut keys: Vec<(&Word, &Word)> = x.block_entries(b).map(|(r, c, _)| (r, c)).collect();
        keys.extend(p.block_entries(b).map(|(r, c, _)| (r, c)));
        keys.sort();
        keys.dedup();
        for (r, c) in keys {
            checked += 1;
            let lhs = x.get(r, c);
            let rhs = p.get(r, c);
            if !lhs.approx_eq(&rhs) {
                defects.push(HarmonicDefect {
                    row: r.clone(),
                    col: c.clone(),
                    value: lhs.to_c64(),
                    markov_value: rhs.to_c64(),
                });
            }
        }
    }
    Ok(HarmonicityReport { block, checked_nonzero: checked, defects })
}
