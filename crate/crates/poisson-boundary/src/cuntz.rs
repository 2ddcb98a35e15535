//! Symbolic algebra of Cuntz monomials `M(I,J) = r_I ∘ r_J*` under the Choi–Effros product.
//!
//! Inside the boundary the right creations satisfy the Cuntz relations exactly, so
//! monomials multiply by word contraction. The relation `Σ_i M((i),(i)) = 1` makes the
//! monomial spanning set redundant; [`CuntzElement::normal_form`] picks canonical
//! representatives and the faithful vacuum state decides equality.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::fock::TruncatedOperator;
use crate::scalar::{coeff_repr, parse_coeff, Field, Mode, Scalar};
use crate::word::{WeightVector, Word};

/// Shared weight vector of a session.
pub type Weights<R> = Arc<WeightVector<R>>;

/// Default symbolic term-count limit; override with `FOCK_TERM_CAP`.
pub const DEFAULT_TERM_CAP: usize = 2_000_000;

/// Term-count limit for symbolic expansions, read once from `FOCK_TERM_CAP`.
pub fn term_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("FOCK_TERM_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_TERM_CAP)
    })
}

pub(crate) fn check_cap(count: usize) -> Result<()> {
    let cap = term_cap();
    if count > cap {
        return Err(Error::TermCap { count, cap });
    }
    Ok(())
}

/// `M(I,J) = r_I ∘ r_J*`; `M((),())` is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub i: Word,
    pub j: Word,
}

impl Monomial {
    pub fn new(i: Word, j: Word) -> Self {
        Monomial { i, j }
    }

    pub fn identity() -> Self {
        Monomial::new(Word::empty(), Word::empty())
    }

    /// `|I| − |J|`, invariant under the expansion relation.
    pub fn degree(&self) -> i64 {
        self.i.len() as i64 - self.j.len() as i64
    }

    pub fn max_len(&self) -> usize {
        self.i.len().max(self.j.len())
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial::new(self.j.clone(), self.i.clone())
    }

    pub fn is_diagonal(&self) -> bool {
        self.i == self.j
    }

    /// Contraction rule: `M(I,J) ∘ M(K,L)` is `M(I·K′, L)` if `K = J·K′`,
    /// `M(I, L·J′)` if `J = K·J′`, and `0` otherwise.
    pub fn contract(&self, other: &Monomial) -> Option<Monomial> {
        if let Some(rest) = other.i.strip_prefix(&self.j) {
            return Some(Monomial::new(self.i.concat(&rest), other.j.clone()));
        }
        if let Some(rest) = self.j.strip_prefix(&other.i) {
            return Some(Monomial::new(self.i.clone(), other.j.concat(&rest)));
        }
        None
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.j.len().cmp(&other.j.len()))
            .then_with(|| self.i.cmp(&other.i))
            .then_with(|| self.j.cmp(&other.j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "M({},{})", self.i, self.j)
    }
}

fn add_into<S: Scalar>(map: &mut BTreeMap<Monomial, S>, m: Monomial, c: S) {
    match map.entry(m) {
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

/// Finite linear combination of monomials.
#[derive(Clone, Debug)]
pub struct CuntzElement<S: Scalar> {
    weights: Weights<S::Real>,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> PartialEq for CuntzElement<S> {
    /// Structural equality of the stored terms. Use [`CuntzElement::equals`] for equality in
    /// the algebra.
    fn eq(&self, other: &Self) -> bool {
        same_weights(&self.weights, &other.weights) && self.terms == other.terms
    }
}

impl<S: Scalar> std::fmt::Display for CuntzElement<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let z = c.to_c64();
            if z.im == 0.0 {
                write!(f, "{}·{m}", z.re)?;
            } else {
                write!(f, "({}{:+}i)·{m}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

fn same_weights<R: crate::scalar::Real>(a: &Weights<R>, b: &Weights<R>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `M(I,J)∘M(K,L)` as an element (a single monomial or zero).
pub fn mono_product<S: Scalar>(a: &Monomial, b: &Monomial, weights: &Weights<S::Real>) -> CuntzElement<S> {
    let mut x = CuntzElement::zero(weights);
    if let Some(m) = a.contract(b) {
        x.terms.insert(m, S::one());
    }
    x
}

impl<S: Scalar> CuntzElement<S> {
    pub fn zero(weights: &Weights<S::Real>) -> Self {
        CuntzElement { weights: weights.clone(), terms: BTreeMap::new() }
    }

    pub fn one(weights: &Weights<S::Real>) -> Self {
        Self::monomial(weights, Monomial::identity(), S::one())
    }

    /// `c · M(I,J)`. Letters are not checked here; see [`CuntzElement::from_terms`].
    pub fn monomial(weights: &Weights<S::Real>, m: Monomial, c: S) -> Self {
        let mut x = Self::zero(weights);
        add_into(&mut x.terms, m, c);
        x
    }

    /// Builds an element, checking letters against the alphabet.
    pub fn from_terms(weights: &Weights<S::Real>, terms: impl IntoIterator<Item = (Monomial, S)>) -> Result<Self> {
        let mut x = Self::zero(weights);
        let d = weights.d();
        for (m, c) in terms {
            m.i.check_alphabet(d)?;
            m.j.check_alphabet(d)?;
            add_into(&mut x.terms, m, c);
        }
        Ok(x)
    }

    /// `r_I = M(I, ())`.
    pub fn r(weights: &Weights<S::Real>, i: &Word) -> Self {
        Self::monomial(weights, Monomial::new(i.clone(), Word::empty()), S::one())
    }

    /// `r_J* = M((), J)`.
    pub fn r_star(weights: &Weights<S::Real>, j: &Word) -> Self {
        Self::monomial(weights, Monomial::new(Word::empty(), j.clone()), S::one())
    }

    /// `M(I,J)` with coefficient one.
    pub fn m(weights: &Weights<S::Real>, i: &Word, j: &Word) -> Self {
        Self::monomial(weights, Monomial::new(i.clone(), j.clone()), S::one())
    }

    pub fn weights(&self) -> &Weights<S::Real> {
        &self.weights
    }

    pub fn d(&self) -> usize {
        self.weights.d()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no terms are stored. Algebraic zero is [`CuntzElement::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Monomial::max_len).max().unwrap_or(0)
    }

    fn check_session(&self, other: &Self) -> Result<()> {
        if same_weights(&self.weights, &other.weights) {
            Ok(())
        } else {
            Err(Error::MixedWeights)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_session(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_into(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&S::one().neg()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(&self.weights);
        for (m, v) in &self.terms {
            add_into(&mut out.terms, m.clone(), v.mul(c));
        }
        out
    }

    /// Bilinear extension of the contraction rule.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_session(other)?;
        check_cap(self.len().saturating_mul(other.len()))?;
        let mut out = Self::zero(&self.weights);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(m) = a.contract(b) {
                    add_into(&mut out.terms, m, ca.mul(cb));
                }
            }
        }
        Ok(out)
    }

    /// `M(I,J) ↦ M(J,I)` with conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.weights);
        for (m, c) in &self.terms {
            add_into(&mut out.terms, m.adjoint(), c.conj());
        }
        out
    }

    /// Maximal `|J|` per degree class `k = |I| − |J|`.
    pub(crate) fn class_depths(&self) -> BTreeMap<i64, usize> {
        let mut depths = BTreeMap::new();
        for m in self.terms.keys() {
            let e = depths.entry(m.degree()).or_insert(0);
            *e = (*e).max(m.j.len());
        }
        depths
    }

    /// Rewrites every monomial of class `k` at `|J| = depths[k]` using
    /// `M(I,J) = Σ_{|K|=n} M(IK, JK)`.
    pub(crate) fn expand_to(&self, depths: &BTreeMap<i64, usize>) -> Result<Self> {
        let d = self.d();
        let mut count = 0usize;
        for m in self.terms.keys() {
            let target = depths.get(&m.degree()).copied().unwrap_or(m.j.len());
            count = count.saturating_add(d.saturating_pow(target.saturating_sub(m.j.len()) as u32));
        }
        check_cap(count)?;
        let mut out = Self::zero(&self.weights);
        let mut suffixes: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let target = depths.get(&m.degree()).copied().unwrap_or(m.j.len());
            let depth = target.saturating_sub(m.j.len());
            if depth == 0 {
                add_into(&mut out.terms, m.clone(), c.clone());
                continue;
            }
            let ks = suffixes.entry(depth).or_insert_with(|| Word::all_of_length(d, depth));
            for k in ks.iter() {
                add_into(&mut out.terms, Monomial::new(m.i.concat(k), m.j.concat(k)), c.clone());
            }
        }
        Ok(out)
    }

    /// Canonical form. Each degree class is expanded to the deepest `|J|` present, where its
    /// monomials share `(|I|, |J|)` and are linearly independent; then classes are folded
    /// back while every monomial belongs to a complete family `{M(Ia, Ja)}_a` with a common
    /// coefficient. The result is the unique shallowest representation.
    pub fn normal_form(&self) -> Result<Self> {
        let expanded = self.expand_to(&self.class_depths())?;
        let mut classes: BTreeMap<i64, BTreeMap<Monomial, S>> = BTreeMap::new();
        for (m, c) in expanded.terms {
            classes.entry(m.degree()).or_default().insert(m, c);
        }
        let d = self.d();
        let mut out = Self::zero(&self.weights);
        for (_, mut class) in classes {
            while let Some(folded) = fold_class(&class, d) {
                class = folded;
            }
            out.terms.extend(class);
        }
        Ok(out)
    }

    /// `φ(M(I,J)) = ω_J δ_{I,J}`, extended linearly.
    pub fn vacuum_state(&self) -> S {
        self.terms
            .iter()
            .filter(|(m, _)| m.is_diagonal())
            .fold(S::zero(), |acc, (m, c)| acc.add(&c.scale(&self.weights.word_weight(&m.j))))
    }

    /// `φ(y* ∘ x)` by literal product.
    pub fn gns_inner_direct(&self, y: &Self) -> Result<S> {
        Ok(y.adjoint().product(self)?.vacuum_state())
    }

    /// `⟨x, y⟩_φ = φ(y* ∘ x)`. Both sides are expanded to a common depth per degree class, where the
    /// monomial vectors are orthogonal with `‖ξ(I,J)‖² = ω_J`.
    pub fn gns_inner(&self, y: &Self) -> Result<S> {
        self.check_session(y)?;
        let mut depths = self.class_depths();
        for (k, v) in y.class_depths() {
            let e = depths.entry(k).or_insert(0);
            *e = (*e).max(v);
        }
        let xe = self.expand_to(&depths)?;
        let ye = y.expand_to(&depths)?;
        let mut acc = S::zero();
        for (m, c) in &xe.terms {
            if let Some(cy) = ye.terms.get(m) {
                acc = acc.add(&c.mul(&cy.conj()).scale(&self.weights.word_weight(&m.j)));
            }
        }
        Ok(acc)
    }

    /// `φ(x* ∘ x)`. Small elements use the literal product; larger ones the orthogonal
    /// normal-form expansion, which computes the same number.
    pub fn gns_norm_sq(&self) -> Result<S> {
        // Float mode always expands: cancellation then happens per coefficient instead of in
        // the squared norm.
        if S::MODE == Mode::Exact && self.len() <= DIRECT_ZERO_TEST_TERMS {
            self.gns_inner_direct(self)
        } else {
            self.gns_inner(self)
        }
    }

    /// Zero test by faithfulness of `φ`: `x = 0` iff `φ(x* ∘ x) = 0`.
    pub fn is_zero(&self) -> Result<bool> {
        let n = self.gns_norm_sq()?;
        Ok(match S::MODE {
            Mode::Exact => n.is_zero(),
            Mode::Float => n.to_c64().norm().sqrt() <= FLOAT_ZERO_NORM,
        })
    }

    /// Equality in the algebra.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.sub(other)?.is_zero()
    }

    /// Compression of the concrete operator representing `x` to words of length `≤ cut`:
    /// `M(I,J) ↦ r_I r_J* + Σ_{t=1}^{|J|} ω_{(J^op)_t} l*_{(J^op)_t} r_I p_Ω r*_{J_{|J|−t}}`.
    /// The compression is exact on the whole cut.
    pub fn to_truncated(&self, cut: usize) -> Result<TruncatedOperator<S>> {
        let need = self.max_word_len();
        if cut < need {
            return Err(Error::Domain(format!("cut {cut} is below the word length {need}")));
        }
        let d = self.d();
        let mut raw = Vec::new();
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for (m, c) in &self.terms {
            lo = lo.min(m.degree());
            hi = hi.max(m.degree());
            let iop = m.i.reverse();
            let jop = m.j.reverse();
            // r_I r_J* e_{C·J^op} = e_{C·I^op}
            for cword in Word::all_up_to(d, cut - m.max_len()) {
                raw.push((cword.concat(&iop), cword.concat(&jop), c.clone()));
            }
            for t in 1..=m.j.len() {
                let head = jop.prefix(t);
                if let Some(row) = iop.strip_prefix(&head) {
                    let col = m.j.prefix(m.j.len() - t).reverse();
                    raw.push((row, col, c.scale(&self.weights.word_weight(&head))));
                }
            }
        }
        if self.terms.is_empty() {
            lo = 0;
            hi = 0;
        }
        Ok(TruncatedOperator::from_parts(d, cut, Some(cut), (lo, hi), raw))
    }

    /// Changes the coefficient ring, keeping the session.
    pub fn map_scalar<T, F>(&self, f: F) -> CuntzElement<T>
    where
        T: Scalar<Real = S::Real>,
        F: Fn(&S) -> T,
    {
        let mut out = CuntzElement::zero(&self.weights);
        for (m, c) in &self.terms {
            add_into(&mut out.terms, m.clone(), f(c));
        }
        out
    }

    /// Applies a per-monomial coefficient map (e.g. modular scaling).
    pub fn map_terms<F>(&self, f: F) -> Self
    where
        F: Fn(&Monomial, &S) -> (Monomial, S),
    {
        let mut out = Self::zero(&self.weights);
        for (m, c) in &self.terms {
            let (m2, c2) = f(m, c);
            add_into(&mut out.terms, m2, c2);
        }
        out
    }

    pub fn to_json(&self) -> ElementJson
    where
        S: Field,
    {
        ElementJson {
            d: self.d(),
            mode: S::MODE,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let r = coeff_repr(c);
                    TermJson { i: m.i.clone(), j: m.j.clone(), re: r.re, im: r.im }
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ElementJson, weights: &Weights<S::Real>) -> Result<Self>
    where
        S: Field,
    {
        if j.d != weights.d() {
            return Err(parse_err("d", format!("element has d = {}, weights have d = {}", j.d, weights.d())));
        }
        if j.mode != S::MODE {
            return Err(parse_err("mode", format!("element is {}, session is {}", j.mode, S::MODE)));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for (k, t) in j.terms.iter().enumerate() {
            let loc = format!("terms[{k}]");
            t.i.check_alphabet(j.d).map_err(|e| parse_err(format!("{loc}.I"), e.to_string()))?;
            t.j.check_alphabet(j.d).map_err(|e| parse_err(format!("{loc}.J"), e.to_string()))?;
            let c = parse_coeff::<S>(&t.re, &t.im).map_err(|e| parse_err(loc, e.to_string()))?;
            terms.push((Monomial::new(t.i.clone(), t.j.clone()), c));
        }
        Self::from_terms(weights, terms)
    }
}

/// Folds a class of equal-depth monomials one level up, if every monomial lies in a
/// complete family `{M(Ia, Ja) : a = 1..d}` with a common coefficient.
fn fold_class<S: Scalar>(class: &BTreeMap<Monomial, S>, d: usize) -> Option<BTreeMap<Monomial, S>> {
    let mut groups: BTreeMap<Monomial, Vec<(u8, &S)>> = BTreeMap::new();
    for (m, c) in class {
        let (a, b) = (m.i.last()?, m.j.last()?);
        if a != b {
            return None;
        }
        let parent = Monomial::new(m.i.prefix(m.i.len() - 1), m.j.prefix(m.j.len() - 1));
        groups.entry(parent).or_default().push((a, c));
    }
    let mut out = BTreeMap::new();
    for (parent, members) in groups {
        if members.len() != d || members.iter().any(|(_, c)| !c.approx_eq(members[0].1)) {
            return None;
        }
        out.insert(parent, members[0].1.clone());
    }
    Some(out)
}

/// Exact elements with at most this many terms are zero-tested by the literal product.
pub const DIRECT_ZERO_TEST_TERMS: usize = 48;

/// Float-mode GNS norm below which an element counts as zero.
pub const FLOAT_ZERO_NORM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(rename = "I")]
    pub i: Word,
    #[serde(rename = "J")]
    pub j: Word,
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub d: usize,
    pub mode: Mode,
    pub terms: Vec<TermJson>,
}
