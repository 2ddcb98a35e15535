//! Modular data of the vacuum state on the GNS span of monomial vectors
//! `ξ(I,J) = π_φ(M(I,J))Ω_φ`: the modular operator `Δ`, the conjugation `J`, the
//! `S`-operator, the modular group `σ_t`, the centralizer test and spectrum samples.
//!
//! Every `ξ(I,J)` is an eigenvector of `Δ` with eigenvalue `ω_I/ω_J`, so all operations are
//! per-monomial rescalings. In exact mode the scalars are [`Symbolic`]: Gaussian-rational
//! combinations of products of prime radicals `p^e` (`0 < e < 1`) and phase symbols `b^{it}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factor_rational, floor_i64};
use crate::cuntz::{CuntzElement, Monomial};
use crate::error::{Error, Result};
use crate::scalar::{Exact, Float, Mode, Real, Scalar};
use crate::word::{WeightVector, Word};

/// A real time parameter with a total order, used as a key for phase symbols.
#[derive(Clone, Copy, Debug)]
pub struct Time(pub f64);

impl PartialEq for Time {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for Time {}
impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `∏ p^{e_p} · ∏ b_t^{it}` with `0 < e_p < 1` and `b_t ≠ 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Basis {
    radical: BTreeMap<BigInt, BigRational>,
    phase: BTreeMap<Time, BigRational>,
}

impl std::hash::Hash for Time {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl Basis {
    /// Product of two basis elements and the rational factor split off the radicals.
    fn mul(&self, other: &Basis) -> (Basis, BigRational) {
        let mut factor = num_traits::one::<BigRational>();
        let mut radical = self.radical.clone();
        for (p, e) in &other.radical {
            let sum = radical.get(p).cloned().unwrap_or_else(num_traits::zero::<BigRational>) + e;
            if sum >= num_traits::one::<BigRational>() {
                factor *= BigRational::from_integer(p.clone());
                let rest = sum - num_traits::one::<BigRational>();
                if Zero::is_zero(&rest) {
                    radical.remove(p);
                } else {
                    radical.insert(p.clone(), rest);
                }
            } else {
                radical.insert(p.clone(), sum);
            }
        }
        let mut phase = self.phase.clone();
        for (t, b) in &other.phase {
            let prod = phase.get(t).cloned().unwrap_or_else(num_traits::one::<BigRational>) * b;
            if One::is_one(&prod) {
                phase.remove(t);
            } else {
                phase.insert(*t, prod);
            }
        }
        (Basis { radical, phase }, factor)
    }

    fn conj(&self) -> Basis {
        Basis {
            radical: self.radical.clone(),
            phase: self.phase.iter().map(|(t, b)| (*t, b.recip())).collect(),
        }
    }

    fn value(&self) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for (p, e) in &self.radical {
            v *= Real::to_f64(&BigRational::from_integer(p.clone())).powf(Real::to_f64(e));
        }
        for (t, b) in &self.phase {
            v *= Complex64::from_polar(1.0, t.0 * Real::to_f64(b).ln());
        }
        v
    }
}

/// Exact scalar for modular computations.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Symbolic {
    terms: BTreeMap<Basis, Exact>,
}

impl Symbolic {
    fn from_basis(b: Basis, c: Exact) -> Self {
        let mut s = Symbolic::default();
        if !Scalar::is_zero(&c) {
            s.terms.insert(b, c);
        }
        s
    }

    fn push(&mut self, b: Basis, c: Exact) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(b) {
            Entry::Vacant(e) => {
                if !Scalar::is_zero(&c) {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let s = Scalar::add(e.get(), &c);
                if Scalar::is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Number of independent basis symbols; `1` for plain Gaussian rationals.
    pub fn symbol_count(&self) -> usize {
        self.terms.len()
    }

    /// The value as a Gaussian rational, if no radicals or phases remain.
    pub fn as_exact(&self) -> Option<Exact> {
        match self.terms.len() {
            0 => Some(<Exact as Scalar>::zero()),
            1 => {
                let (b, c) = self.terms.iter().next()?;
                (b.radical.is_empty() && b.phase.is_empty()).then(|| c.clone())
            }
            _ => None,
        }
    }
}

impl From<Exact> for Symbolic {
    fn from(c: Exact) -> Self {
        Symbolic::from_basis(Basis::default(), c)
    }
}

impl Scalar for Symbolic {
    type Real = BigRational;
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Symbolic::default()
    }
    fn one() -> Self {
        Symbolic::from(<Exact as Scalar>::one())
    }
    fn from_real(r: &BigRational) -> Self {
        Symbolic::from(<Exact as Scalar>::from_real(r))
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in &o.terms {
            out.push(b.clone(), c.clone());
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Symbolic::default();
        for (b1, c1) in &self.terms {
            for (b2, c2) in &o.terms {
                let (b, f) = b1.mul(b2);
                out.push(b, Scalar::scale(&Scalar::mul(c1, c2), &f));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Symbolic {
            terms: self.terms.iter().map(|(b, c)| (b.clone(), Scalar::neg(c))).collect(),
        }
    }
    fn conj(&self) -> Self {
        let mut out = Symbolic::default();
        for (b, c) in &self.terms {
            out.push(b.conj(), Scalar::conj(c));
        }
        out
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn to_c64(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(b, c)| b.value() * c.to_c64())
            .sum()
    }
    fn scale(&self, r: &BigRational) -> Self {
        let mut out = Symbolic::default();
        for (b, c) in &self.terms {
            out.push(b.clone(), Scalar::scale(c, r));
        }
        out
    }
}

/// Scalars that can carry real and imaginary powers of positive reals.
pub trait ModularScalar: Scalar {
    /// `base^exponent` for `base > 0`.
    fn real_power(base: &Self::Real, exponent: &BigRational) -> Self;
    /// `base^{it}` for `base > 0`.
    fn imaginary_power(base: &Self::Real, t: f64) -> Self;
}

impl ModularScalar for Symbolic {
    fn real_power(base: &BigRational, exponent: &BigRational) -> Self {
        let mut coeff = num_traits::one::<BigRational>();
        let mut radical = BTreeMap::new();
        for (p, n) in factor_rational(base) {
            let total = exponent * BigRational::from_integer(n.into());
            let fl = floor_i64(&total);
            let frac = &total - BigRational::from_integer(fl.into());
            let pr = BigRational::from_integer(p.clone());
            coeff *= if fl >= 0 {
                num_traits::pow(pr, fl as usize)
            } else {
                num_traits::pow(pr.recip(), (-fl) as usize)
            };
            if !Zero::is_zero(&frac) {
                radical.insert(p, frac);
            }
        }
        Symbolic::from_basis(Basis { radical, phase: BTreeMap::new() }, Complex::new(coeff, num_traits::zero::<BigRational>()))
    }

    fn imaginary_power(base: &BigRational, t: f64) -> Self {
        if base.is_one() || t == 0.0 {
            return Symbolic::one();
        }
        let mut phase = BTreeMap::new();
        phase.insert(Time(t), base.clone());
        Symbolic::from_basis(Basis { radical: BTreeMap::new(), phase }, <Exact as Scalar>::one())
    }
}

impl ModularScalar for Float {
    fn real_power(base: &f64, exponent: &BigRational) -> Self {
        Complex64::new(base.powf(Real::to_f64(exponent)), 0.0)
    }
    fn imaginary_power(base: &f64, t: f64) -> Self {
        Complex64::from_polar(1.0, t * base.ln())
    }
}

/// A power of `Δ`: real `p` gives `Δ^p`, imaginary `t` gives `Δ^{it}`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaPower {
    Real(BigRational),
    Imaginary(f64),
}

/// `Σ c · ξ(I,J)` with the inner product `⟨ξ(I,J), ξ(K,L)⟩ = φ(M(L,K) ∘ M(I,J))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsVector<S: Scalar> {
    element: CuntzElement<S>,
}

impl<S: Scalar> GnsVector<S> {
    pub fn new(element: CuntzElement<S>) -> Self {
        GnsVector { element }
    }

    pub fn element(&self) -> &CuntzElement<S> {
        &self.element
    }

    pub fn inner(&self, other: &Self) -> Result<S> {
        self.element.gns_inner(&other.element)
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.element.equals(&other.element)
    }
}

fn ratio<S: Scalar>(x: &CuntzElement<S>, m: &Monomial) -> S::Real {
    let w = x.weights();
    w.word_weight(&m.i).div(&w.word_weight(&m.j))
}

/// `Δ^p ξ(I,J) = (ω_I/ω_J)^p ξ(I,J)`.
pub fn delta_apply<S: ModularScalar>(v: &GnsVector<S>, power: &DeltaPower) -> GnsVector<S> {
    let x = &v.element;
    GnsVector::new(x.map_terms(|m, c| {
        let r = ratio(x, m);
        let f = match power {
            DeltaPower::Real(p) => S::real_power(&r, p),
            DeltaPower::Imaginary(t) => S::imaginary_power(&r, *t),
        };
        (m.clone(), c.mul(&f))
    }))
}

/// `J(c ξ(I,J)) = c̄ √(ω_J/ω_I) ξ(J,I)`.
pub fn modular_conjugation<S: ModularScalar>(v: &GnsVector<S>) -> GnsVector<S> {
    let x = &v.element;
    let half = BigRational::new(1.into(), 2.into());
    GnsVector::new(x.map_terms(|m, c| {
        let r = x.weights().word_weight(&m.j).div(&x.weights().word_weight(&m.i));
        (m.adjoint(), c.conj().mul(&S::real_power(&r, &half)))
    }))
}

/// `S(c ξ(I,J)) = c̄ ξ(J,I)`.
pub fn s_operator<S: Scalar>(v: &GnsVector<S>) -> GnsVector<S> {
    GnsVector::new(v.element.adjoint())
}

/// `σ_t(M(I,J)) = (ω_I/ω_J)^{it} M(I,J)`.
pub fn sigma_t<S: ModularScalar>(x: &CuntzElement<S>, t: f64) -> CuntzElement<S> {
    x.map_terms(|m, c| (m.clone(), c.mul(&S::imaginary_power(&ratio(x, m), t))))
}

/// True iff every monomial of the normal form has `ω_I = ω_J`.
pub fn is_centralizer<S: Scalar>(x: &CuntzElement<S>) -> Result<bool> {
    let nf = x.normal_form()?;
    let w = nf.weights().clone();
    let ok = nf
        .terms()
        .all(|(m, _)| w.word_weight(&m.i).approx_eq(&w.word_weight(&m.j)));
    Ok(ok)
}

/// Checks `φ(x∘y) = φ(y∘x)` against the given sample; returns the failing indices.
pub fn phi_commutation_failures<S: Scalar>(x: &CuntzElement<S>, ys: &[CuntzElement<S>]) -> Result<Vec<usize>> {
    let mut bad = Vec::new();
    for (k, y) in ys.iter().enumerate() {
        let a = x.product(y)?.vacuum_state();
        let b = y.product(x)?.vacuum_state();
        if !a.approx_eq(&b) {
            bad.push(k);
        }
    }
    Ok(bad)
}

/// Limit on the `(Σ_{n≤L} dⁿ)²` word pairs a spectrum sample may cover.
pub const SPECTRUM_PAIR_CAP: u128 = 100_000_000;

/// `{ω_I/ω_J : |I|, |J| ≤ L}`, sorted and deduplicated.
pub fn spectrum_sample<R: Real>(w: &WeightVector<R>, max_len: usize) -> Result<Vec<R>> {
    let d = w.d() as u128;
    let mut words: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=max_len {
        words = words.saturating_add(level);
        level = level.saturating_mul(d);
    }
    let pairs = words.saturating_mul(words);
    if pairs > SPECTRUM_PAIR_CAP {
        return Err(Error::Limit(format!(
            "{pairs} word pairs at d = {d}, L = {max_len} exceeds the cap {SPECTRUM_PAIR_CAP}"
        )));
    }
    // Distinct ω_I by level; the multiset of letters determines the weight.
    let mut weights: Vec<R> = vec![R::one()];
    let mut frontier: Vec<R> = vec![R::one()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for v in &frontier {
            for i in 1..=w.d() as u8 {
                next.push(v.mul(w.get(i)));
            }
        }
        sort_dedup(&mut next);
        weights.extend(next.iter().cloned());
        frontier = next;
    }
    sort_dedup(&mut weights);
    let mut out = Vec::with_capacity(weights.len() * weights.len());
    for a in &weights {
        for b in &weights {
            out.push(a.div(b));
        }
    }
    sort_dedup(&mut out);
    Ok(out)
}

fn sort_dedup<R: Real>(v: &mut Vec<R>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v.dedup_by(|a, b| a.approx_eq(b));
}

/// Monomial vectors `ξ(I,J)` with `|I|, |J| ≤ L` in basis order.
pub fn monomial_family(d: usize, max_len: usize) -> Vec<Monomial> {
    let words = Word::all_up_to(d, max_len);
    let mut out = Vec::with_capacity(words.len() * words.len());
    for i in &words {
        for j in &words {
            out.push(Monomial::new(i.clone(), j.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        Word::parse(s, 9).unwrap()
    }

    type Sym = CuntzElement<Symbolic>;

    fn om() -> Arc<WeightVector<BigRational>> {
        Arc::new(WeightVector::parse("1/3,2/3").unwrap())
    }

    #[test]
    fn radicals_are_canonical() {
        let half = rat(1, 2);
        let a = Symbolic::real_power(&rat(2, 1), &half);
        assert_eq!(a.mul(&a), Symbolic::from_real(&rat(2, 1)));
        let b = Symbolic::real_power(&rat(1, 8), &half);
        // (1/8)^{1/2} = 2^{-3/2} = (1/4)·2^{1/2}
        assert_eq!(b, a.scale(&rat(1, 4)));
        assert!((b.to_c64().re - (0.125f64).sqrt()).abs() < 1e-15);
        let p = Symbolic::imaginary_power(&rat(1, 2), 0.7);
        assert_eq!(p.mul(&p.conj()), Symbolic::one());
    }

    #[test]
    fn delta_examples() {
        let s = om();
        let v = GnsVector::new(Sym::m(&s, &w("1"), &w("2")));
        let got = delta_apply(&v, &DeltaPower::Real(rat(1, 1)));
        assert_eq!(got, GnsVector::new(Sym::m(&s, &w("1"), &w("2")).scale(&Symbolic::from_real(&rat(1, 2)))));
        let u = Arc::new(WeightVector::uniform(2).unwrap());
        let v = GnsVector::new(Sym::m(&u, &w("1"), &w("")));
        let got = delta_apply(&v, &DeltaPower::Real(rat(1, 2)));
        let c = got.element().coefficient(&Monomial::new(w("1"), w("")));
        assert!((c.to_c64().re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn conjugation_examples() {
        let s = om();
        let v = GnsVector::new(Sym::m(&s, &w("1"), &w("2")));
        let j = modular_conjugation(&v);
        let c = j.element().coefficient(&Monomial::new(w("2"), w("1")));
        assert_eq!(c.mul(&c), Symbolic::from_real(&rat(2, 1)));
        assert_eq!(modular_conjugation(&j), v);
        let lhs = modular_conjugation(&delta_apply(&v, &DeltaPower::Real(rat(1, 2))));
        assert_eq!(lhs, s_operator(&v));
    }

    #[test]
    fn sigma_and_centralizer() {
        let s = om();
        let x = Sym::m(&s, &w("1"), &w("2"));
        let got = sigma_t(&x, 0.3);
        let c = got.coefficient(&Monomial::new(w("1"), w("2")));
        assert_eq!(c, Symbolic::imaginary_power(&rat(1, 2), 0.3));
        assert!(is_centralizer(&Sym::m(&s, &w("12"), &w("12"))).unwrap());
        assert!(!is_centralizer(&x).unwrap());
        let u = Arc::new(WeightVector::uniform(2).unwrap());
        assert!(is_centralizer(&Sym::m(&u, &w("1"), &w("2"))).unwrap());
    }

    #[test]
    fn spectrum_examples() {
        let u = WeightVector::<BigRational>::uniform(2).unwrap();
        let got = spectrum_sample(&u, 2).unwrap();
        assert_eq!(got, vec![rat(1, 4), rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1)]);
        assert_eq!(spectrum_sample(&u, 0).unwrap(), vec![rat(1, 1)]);
        let o = WeightVector::<BigRational>::parse("1/3,2/3").unwrap();
        let got = spectrum_sample(&o, 1).unwrap();
        assert_eq!(got, vec![rat(1, 3), rat(1, 2), rat(2, 3), rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)]);
        assert!(matches!(spectrum_sample(&u, 40), Err(Error::Limit(_))));
    }
}
