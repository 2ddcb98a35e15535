//! Second quantization `Γ_U` of a one-particle unitary and the induced map
//! `Γ̃_U(x) = Γ_U x Γ_U*`, symbolically on monomials and numerically on truncated operators.
//!
//! Convention: `f_i = U e_i = Σ_j u_ij e_j`, so `Γ_U e_B` has coefficient `∏_t u_{b_t a_t}`
//! on `e_A` and the composite `UV` has entries `(v·u)_ik = Σ_j v_ij u_jk`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cuntz::{check_cap, CuntzElement, Monomial};
use crate::error::{Error, Result};
use crate::fock::{build_vacuum_projection, is_harmonic, FockVector, TruncatedOperator};
use crate::linalg::Dense;
use crate::random::{random_element, random_monomial, random_truncated, RandomScalar};
use crate::scalar::{coeff_repr, gauss, parse_coeff, CoeffRepr, Exact, Field, Float, Real};
use crate::word::{WeightVector, Word};

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix<S: Field> {
    u: Dense<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryJson {
    pub d: usize,
    pub entries: Vec<Vec<CoeffRepr>>,
}

fn mat_mul<S: Field>(a: &Dense<S>, b: &Dense<S>) -> Dense<S> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| (0..n).fold(S::zero(), |acc, j| acc.add(&a[i][j].mul(&b[j][k]))))
                .collect()
        })
        .collect()
}

fn conj_transpose<S: Field>(a: &Dense<S>) -> Dense<S> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

impl<S: Field> UnitaryMatrix<S> {
    /// Validates `u u* = u* u = 1` (exactly, or within the float tolerance).
    pub fn new(u: Dense<S>) -> Result<Self> {
        let d = u.len();
        if d == 0 || u.iter().any(|r| r.len() != d) {
            return Err(Error::Domain("unitary must be a non-empty square matrix".into()));
        }
        let us = conj_transpose(&u);
        for p in [mat_mul(&u, &us), mat_mul(&us, &u)] {
            for (i, row) in p.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let want = if i == j { S::one() } else { S::zero() };
                    if !x.sub(&want).is_zero() {
                        return Err(Error::Domain(format!("matrix is not unitary at ({}, {})", i + 1, j + 1)));
                    }
                }
            }
        }
        Ok(UnitaryMatrix { u })
    }

    pub fn identity(d: usize) -> Self {
        let u = (0..d)
            .map(|i| (0..d).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        UnitaryMatrix { u }
    }

    /// `U e_i = e_{perm[i]}` (0-based).
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut u = vec![vec![S::zero(); d]; d];
        for (i, &p) in perm.iter().enumerate() {
            if p >= d {
                return Err(Error::Domain(format!("permutation entry {p} out of range")));
            }
            u[i][p] = S::one();
        }
        Self::new(u)
    }

    /// Exchanges `e_a` and `e_b` (letters, 1-based).
    pub fn swap(d: usize, a: u8, b: u8) -> Result<Self> {
        let mut perm: Vec<usize> = (0..d).collect();
        let (a, b) = (a as usize - 1, b as usize - 1);
        if a >= d || b >= d {
            return Err(Error::Domain("swap letters out of range".into()));
        }
        perm.swap(a, b);
        Self::permutation(&perm)
    }

    pub fn d(&self) -> usize {
        self.u.len()
    }

    /// `u_ij` for letters `i, j`.
    pub fn entry(&self, i: u8, j: u8) -> &S {
        &self.u[i as usize - 1][j as usize - 1]
    }

    pub fn matrix(&self) -> &Dense<S> {
        &self.u
    }

    /// The unitary `UV` (apply `V` first).
    pub fn compose(&self, v: &Self) -> Self {
        UnitaryMatrix { u: mat_mul(&v.u, &self.u) }
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix { u: conj_transpose(&self.u) }
    }

    /// `U e_i` as `(j, u_ij)` with non-zero coefficients.
    fn image(&self, i: u8) -> Vec<(u8, S)> {
        self.u[i as usize - 1]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as u8 + 1, c.clone()))
            .collect()
    }

    pub fn to_json(&self) -> UnitaryJson {
        UnitaryJson {
            d: self.d(),
            entries: self.u.iter().map(|r| r.iter().map(coeff_repr).collect()).collect(),
        }
    }

    pub fn from_json(j: &UnitaryJson) -> Result<Self> {
        if j.entries.len() != j.d {
            return Err(Error::Domain(format!("expected {} rows, found {}", j.d, j.entries.len())));
        }
        let u = j
            .entries
            .iter()
            .map(|r| r.iter().map(|c| parse_coeff(&c.re, &c.im)).collect::<Result<Vec<S>>>())
            .collect::<Result<Dense<S>>>()?;
        Self::new(u)
    }
}

/// `U^{⊗|B|} e_B` as a list of `(A, coefficient)`.
fn tensor_image<S: Field>(u: &UnitaryMatrix<S>, b: &Word) -> Vec<(Word, S)> {
    let mut acc: Vec<(Vec<u8>, S)> = vec![(Vec::new(), S::one())];
    for &letter in b.letters() {
        let img = u.image(letter);
        acc = acc
            .iter()
            .flat_map(|(w, c)| {
                img.iter().map(move |(j, cj)| {
                    let mut w2 = w.clone();
                    w2.push(*j);
                    (w2, c.mul(cj))
                })
            })
            .collect();
    }
    acc.into_iter().map(|(w, c)| (Word::from_letters(&w), c)).collect()
}

/// `Γ_U`, acting as `U^{⊗n}` on words of length `n`.
pub fn second_quantize<S: Field>(u: &UnitaryMatrix<S>, cut: usize) -> TruncatedOperator<S> {
    TruncatedOperator::from_basis_map(u.d(), cut, (0, 0), |b| tensor_image(u, b))
}

/// `Γ_U x Γ_U*`, built entry by entry: `(x)_{CD}` contributes
/// `(Γ_U)_{AC} (x)_{CD} conj((Γ_U)_{BD})` at `(A, B)`. Cheap for sparse `x`.
pub fn conjugate<S: Field>(u: &UnitaryMatrix<S>, x: &TruncatedOperator<S>) -> Result<TruncatedOperator<S>> {
    if u.d() != x.d() {
        return Err(Error::Contract(format!("unitary has d = {}, operator d = {}", u.d(), x.d())));
    }
    let mut images: HashMap<Word, Vec<(Word, S)>> = HashMap::new();
    let mut raw = Vec::new();
    for (c, dcol, v) in x.entries() {
        for w in [c, dcol] {
            if !images.contains_key(w) {
                images.insert(w.clone(), tensor_image(u, w));
            }
        }
        for (a, gac) in &images[c] {
            let left = gac.mul(v);
            for (b, gbd) in &images[dcol] {
                raw.push((a.clone(), b.clone(), left.mul(&gbd.conj())));
            }
        }
    }
    Ok(TruncatedOperator::from_parts(x.d(), x.cut(), x.exact_block(), x.shift_bounds(), raw))
}

/// `Γ̃_U` on the algebra: `M(I,J) ↦ Σ_{K,L} ∏ u_{i_t k_t} ∏ conj(u_{j_s l_s}) M(K,L)`.
///
/// This is a *-automorphism only for uniform weights; otherwise the map does not preserve the
/// product (see [`counterexample_report`]) and is refused.
pub fn symbolic_gamma<S: Field>(u: &UnitaryMatrix<S>, x: &CuntzElement<S>) -> Result<CuntzElement<S>> {
    if !x.weights().is_uniform() {
        return Err(Error::NonUniformWeights(
            "Γ̃_U is multiplicative only for uniform weights; see the counterexample check".into(),
        ));
    }
    if u.d() != x.d() {
        return Err(Error::Contract(format!("unitary has d = {}, element d = {}", u.d(), x.d())));
    }
    let mut terms = Vec::new();
    for (m, c) in x.terms() {
        let ki = tensor_image(u, &m.i);
        let lj = tensor_image(u, &m.j);
        check_cap(terms.len().saturating_add(ki.len().saturating_mul(lj.len())))?;
        for (k, ck) in &ki {
            for (l, cl) in &lj {
                terms.push((Monomial::new(k.clone(), l.clone()), c.mul(ck).mul(&cl.conj())));
            }
        }
    }
    CuntzElement::from_terms(x.weights(), terms)
}

/// `Ψ_U Ψ_V = Ψ_{UV}` on every generator `r_i`.
pub fn homomorphism_on_generators<S: Field>(
    u: &UnitaryMatrix<S>,
    v: &UnitaryMatrix<S>,
    weights: &crate::cuntz::Weights<S::Real>,
) -> Result<bool> {
    let uv = u.compose(v);
    for i in 1..=weights.d() as u8 {
        let r = CuntzElement::r(weights, &Word::from_letters(&[i]));
        let lhs = symbolic_gamma(u, &symbolic_gamma(v, &r)?)?;
        let rhs = symbolic_gamma(&uv, &r)?;
        if !lhs.equals(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutomorphismReport {
    pub pairs: usize,
    pub product_failures: usize,
    pub adjoint_failures: usize,
    pub zero_failures: usize,
    pub inverse_failures: usize,
    pub passed: bool,
}

/// Checks on random pairs that `Γ̃_U` preserves products, adjoints and zero tests, and that
/// `Γ̃_{U*}` inverts it. The zero test uses a redundant expansion
/// `c M(I,J) − Σ_a c M(Ia,Ja)` of zero.
pub fn automorphism_check<S: RandomScalar, G: Rng + ?Sized>(
    u: &UnitaryMatrix<S>,
    weights: &crate::cuntz::Weights<S::Real>,
    pairs: usize,
    max_len: usize,
    rng: &mut G,
) -> Result<AutomorphismReport> {
    let d = weights.d();
    let u_adj = u.adjoint();
    let mut rep = AutomorphismReport {
        pairs,
        product_failures: 0,
        adjoint_failures: 0,
        zero_failures: 0,
        inverse_failures: 0,
        passed: false,
    };
    for _ in 0..pairs {
        let x = random_element::<S, _>(weights, 2, max_len, rng);
        let y = random_element::<S, _>(weights, 2, max_len, rng);
        let gx = symbolic_gamma(u, &x)?;
        let gy = symbolic_gamma(u, &y)?;
        if !symbolic_gamma(u, &x.product(&y)?)?.equals(&gx.product(&gy)?)? {
            rep.product_failures += 1;
        }
        if !symbolic_gamma(u, &x.adjoint())?.equals(&gx.adjoint())? {
            rep.adjoint_failures += 1;
        }
        let m = random_monomial(d, max_len, rng);
        let c = S::random_small(rng);
        let mut terms = vec![(m.clone(), c.clone())];
        for a in 1..=d as u8 {
            terms.push((Monomial::new(m.i.append(a), m.j.append(a)), c.neg()));
        }
        let z = CuntzElement::from_terms(weights, terms)?;
        if !symbolic_gamma(u, &z)?.is_zero()? || gx.is_zero()? != x.is_zero()? {
            rep.zero_failures += 1;
        }
        if !symbolic_gamma(&u_adj, &gx)?.equals(&x)? {
            rep.inverse_failures += 1;
        }
    }
    rep.passed = rep.product_failures + rep.adjoint_failures + rep.zero_failures + rep.inverse_failures == 0;
    Ok(rep)
}

/// `P′(y) = Σ_i ω_i l_{f_i}* y l_{f_i}` with `f_i = V e_i`:
/// `P′(y)_{AB} = Σ_i ω_i Σ_{j,k} v_ij conj(v_ik) y_{kA, jB}`.
pub fn markov_prime<S: Field>(
    y: &TruncatedOperator<S>,
    v: &UnitaryMatrix<S>,
    w: &WeightVector<S::Real>,
) -> Result<TruncatedOperator<S>> {
    if y.cut() == 0 {
        return Err(Error::CutExhausted("Markov step needs cut >= 1".into()));
    }
    let d = w.d();
    // c_{kj} = Σ_i ω_i v_ij conj(v_ik)
    let mut c = vec![vec![S::zero(); d]; d];
    for i in 1..=d as u8 {
        for j in 1..=d as u8 {
            for k in 1..=d as u8 {
                let t = v.entry(i, j).mul(&v.entry(i, k).conj()).scale(w.get(i));
                c[k as usize - 1][j as usize - 1] = c[k as usize - 1][j as usize - 1].add(&t);
            }
        }
    }
    let mut raw = Vec::new();
    for (r, col, val) in y.entries() {
        if let (Some(k), Some(j)) = (r.first(), col.first()) {
            let f = &c[k as usize - 1][j as usize - 1];
            if !f.is_zero() {
                raw.push((
                    Word::from_letters(&r.letters()[1..]),
                    Word::from_letters(&col.letters()[1..]),
                    val.mul(f),
                ));
            }
        }
    }
    let exact = y.exact_block().and_then(|e| e.checked_sub(1));
    Ok(TruncatedOperator::from_parts(d, y.cut() - 1, exact, y.shift_bounds(), raw))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisIndependenceReport {
    pub cut: usize,
    pub instances: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Checks `Γ̃_V ∘ P_ω = P′_ω ∘ Γ̃_V` on the given operators, compared on the exact block.
pub fn basis_independence_check<S: Field>(
    w: &WeightVector<S::Real>,
    v: &UnitaryMatrix<S>,
    samples: &[TruncatedOperator<S>],
) -> Result<BasisIndependenceReport> {
    let mut max_dev: f64 = 0.0;
    let mut passed = true;
    if v.d() != w.d() {
        return Err(Error::Contract(format!("unitary has d = {}, weights d = {}", v.d(), w.d())));
    }
    let cut = samples.iter().map(TruncatedOperator::cut).max().unwrap_or(0);
    for x in samples {
        let lhs = conjugate(v, &crate::fock::markov_step(x, w)?)?;
        let rhs = markov_prime(&conjugate(v, x)?, v, w)?;
        let block = lhs.exact_block().unwrap_or(0).min(rhs.exact_block().unwrap_or(0));
        let (ok, dev) = lhs.compare_on_block(&rhs, block);
        passed &= ok;
        max_dev = max_dev.max(dev);
    }
    Ok(BasisIndependenceReport {
        cut,
        instances: samples.len(),
        max_deviation: max_dev,
        passed,
    })
}

/// Runs [`basis_independence_check`] on `n` random sparse operators.
pub fn basis_independence_random<S: RandomScalar, G: Rng + ?Sized>(
    w: &WeightVector<S::Real>,
    v: &UnitaryMatrix<S>,
    cut: usize,
    n: usize,
    rng: &mut G,
) -> Result<BasisIndependenceReport> {
    let samples: Vec<TruncatedOperator<S>> = (0..n).map(|_| random_truncated(w.d(), cut, 12, rng)).collect();
    basis_independence_check(w, v, &samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub i0: u8,
    pub j0: u8,
    pub cut: usize,
    /// `Γ̃_U(r_{i0} ∘ r_{j0}*) − r_{j0} ∘ r_{i0}*` for the swap `U`.
    pub literal_difference_is_zero: bool,
    pub literal_difference_norm: f64,
    /// `Γ̃_U(r_{i0} ∘ r_{i0}*) − r_{j0} ∘ r_{j0}*`, which equals `(ω_{i0} − ω_{j0}) p_Ω`.
    pub witness_coefficient: CoeffRepr,
    pub witness_is_multiple_of_vacuum_projection: bool,
    pub witness_norm: f64,
    /// Whether the image `Γ̃_U(r_{i0} ∘ r_{i0}*)` is still harmonic.
    pub image_is_harmonic: bool,
}

/// Shows that for `ω_{i0} ≠ ω_{j0}` the swap of `e_{i0}, e_{j0}` does not induce a map of
/// the boundary: the image of the harmonic element `r_{i0} ∘ r_{i0}*` is not harmonic.
///
/// The difference `Γ̃_U(r_{i0} ∘ r_{j0}*) − r_{j0} ∘ r_{i0}*` is reported as well; for
/// `i0 ≠ j0` it vanishes, since `M(i,j) = r_i r_j*` has no vacuum correction.
pub fn counterexample_report<S: Field>(
    w: &crate::cuntz::Weights<S::Real>,
    i0: u8,
    j0: u8,
    cut: usize,
) -> Result<CounterexampleReport> {
    let d = w.d();
    for l in [i0, j0] {
        if l == 0 || l as usize > d {
            return Err(Error::Domain(format!("letter {l} out of range 1..={d}")));
        }
    }
    if w.get(i0).approx_eq(w.get(j0)) {
        return Err(Error::Domain(format!(
            "ω_{i0} = ω_{j0}: no counterexample exists for equal weights"
        )));
    }
    if cut < 2 {
        return Err(Error::Domain("counterexample needs cut >= 2".into()));
    }
    let u = UnitaryMatrix::<S>::swap(d, i0, j0)?;
    let wi = Word::from_letters(&[i0]);
    let wj = Word::from_letters(&[j0]);
    let m = |a: &Word, b: &Word| CuntzElement::<S>::m(w, a, b).to_truncated(cut);

    let literal = conjugate(&u, &m(&wi, &wj)?)?.sub(&m(&wj, &wi)?)?;
    let image = conjugate(&u, &m(&wi, &wi)?)?;
    let witness = image.sub(&m(&wj, &wj)?)?;
    let coefficient = witness.get(&Word::empty(), &Word::empty());
    let expected = build_vacuum_projection::<S>(d, cut).scale(&coefficient);
    let (is_multiple, _) = witness.compare_on_block(&expected, cut);
    let harmonic = is_harmonic(&image, w)?.is_harmonic();
    Ok(CounterexampleReport {
        i0,
        j0,
        cut,
        literal_difference_is_zero: literal.is_zero(),
        literal_difference_norm: literal.frobenius_norm(),
        witness_coefficient: coeff_repr(&coefficient),
        witness_is_multiple_of_vacuum_projection: is_multiple,
        witness_norm: witness.frobenius_norm(),
        image_is_harmonic: harmonic,
    })
}

/// `⟨Γ̃_U(x)Ω, Ω⟩ = ⟨xΩ, Ω⟩`.
pub fn preserves_vacuum_state<S: Field>(u: &UnitaryMatrix<S>, x: &TruncatedOperator<S>) -> Result<bool> {
    let omega = FockVector::<S>::vacuum(x.d(), x.cut());
    let a = conjugate(u, x)?.apply(&omega)?.get(&Word::empty());
    let b = x.apply(&omega)?.get(&Word::empty());
    Ok(a.approx_eq(&b))
}

/// Pythagorean triples for exact rotations.
const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

/// Unit-modulus Gaussian rationals for exact phases.
fn exact_phase<G: Rng + ?Sized>(rng: &mut G) -> Exact {
    let (a, b, c) = TRIPLES[rng.gen_range(0..TRIPLES.len())];
    let choices = [
        gauss(1, 1, 0, 1),
        gauss(-1, 1, 0, 1),
        gauss(0, 1, 1, 1),
        gauss(0, 1, -1, 1),
        gauss(a, c, b, c),
        gauss(b, c, -a, c),
        gauss(-a, c, b, c),
    ];
    choices[rng.gen_range(0..choices.len())].clone()
}

/// Random exact unitary: permutation, a few Pythagorean rotations and Gaussian phases.
pub fn random_exact_unitary<G: Rng + ?Sized>(d: usize, rng: &mut G) -> UnitaryMatrix<Exact> {
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let mut u = UnitaryMatrix::<Exact>::permutation(&perm).expect("valid permutation").u;
    for _ in 0..2 {
        let p = rng.gen_range(0..d);
        let q = (p + rng.gen_range(1..d)) % d;
        let (a, b, c) = TRIPLES[rng.gen_range(0..TRIPLES.len())];
        let mut rot = UnitaryMatrix::<Exact>::identity(d).u;
        rot[p][p] = gauss(a, c, 0, 1);
        rot[p][q] = gauss(-b, c, 0, 1);
        rot[q][p] = gauss(b, c, 0, 1);
        rot[q][q] = gauss(a, c, 0, 1);
        u = mat_mul(&u, &rot);
    }
    let mut phases = UnitaryMatrix::<Exact>::identity(d).u;
    for (i, row) in phases.iter_mut().enumerate() {
        row[i] = exact_phase(rng);
    }
    UnitaryMatrix::new(mat_mul(&u, &phases)).expect("product of unitaries is unitary")
}

/// Random float unitary by Gram–Schmidt on a random complex matrix.
pub fn random_float_unitary<G: Rng + ?Sized>(d: usize, rng: &mut G) -> UnitaryMatrix<Float> {
    loop {
        let mut rows: Vec<Vec<Float>> = (0..d)
            .map(|_| (0..d).map(|_| Float::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let proj: Float = (0..d).map(|k| rows[i][k] * rows[j][k].conj()).sum();
                for k in 0..d {
                    let t = rows[j][k] * proj;
                    rows[i][k] -= t;
                }
            }
            let norm = rows[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            rows[i].iter_mut().for_each(|z| *z /= norm);
        }
        if ok {
            if let Ok(u) = UnitaryMatrix::new(rows) {
                return u;
            }
        }
    }
}

/// Generates a random unitary in the scalar's mode.
pub trait RandomUnitary: RandomScalar {
    fn random_unitary<G: Rng + ?Sized>(d: usize, rng: &mut G) -> UnitaryMatrix<Self>;
}

impl RandomUnitary for Exact {
    fn random_unitary<G: Rng + ?Sized>(d: usize, rng: &mut G) -> UnitaryMatrix<Self> {
        random_exact_unitary(d, rng)
    }
}

impl RandomUnitary for Float {
    fn random_unitary<G: Rng + ?Sized>(d: usize, rng: &mut G) -> UnitaryMatrix<Self> {
        random_float_unitary(d, rng)
    }
}
