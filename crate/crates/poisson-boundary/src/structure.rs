//! Finite-span probes of the structure of the boundary algebra: the diagonal masa, central
//! conditions, the shift endomorphism `α` with its flip unitaries, diffuseness of the diagonal
//! and faithfulness of the vacuum state. Every report describes the tested span only.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::cuntz::{CuntzElement, Monomial, Weights};
use crate::error::{Error, Result};
use crate::linalg::{is_psd, nullspace, rank, Dense};
use crate::random::{random_element, RandomScalar};
use crate::scalar::{Field, Real, Scalar};
use crate::word::Word;

/// Largest span the masa probe will solve over.
pub const MASA_SPAN_CAP: usize = 4096;

fn letter(i: u8) -> Word {
    Word::from_letters(&[i])
}

/// Keeps the monomials with `I = J` in the normal form.
pub fn diagonal_part<S: Scalar>(x: &CuntzElement<S>) -> Result<CuntzElement<S>> {
    let nf = x.normal_form()?;
    let kept: Vec<(Monomial, S)> = nf
        .terms()
        .filter(|(m, _)| m.is_diagonal())
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    CuntzElement::from_terms(x.weights(), kept)
}

/// `φ(r_I* ∘ x ∘ r_J) = 0` for all `I ≠ J` up to the normal form's word length.
pub fn is_diagonal<S: Scalar>(x: &CuntzElement<S>) -> Result<bool> {
    let nf = x.normal_form()?;
    let w = x.weights();
    let words = Word::all_up_to(w.d(), nf.max_word_len());
    for i in &words {
        let left = CuntzElement::r_star(w, i).product(&nf)?;
        for j in &words {
            if i == j {
                continue;
            }
            if !left.product(&CuntzElement::r(w, j))?.vacuum_state().is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Basis of the span of `{M(I,J) : |I|, |J| ≤ L}`: per degree class, the monomials at the
/// deepest level the bound allows. Shallower monomials are sums of these.
pub fn span_basis(d: usize, max_len: usize) -> Vec<Monomial> {
    let l = max_len as i64;
    let mut out = Vec::new();
    for k in -l..=l {
        let (li, lj) = if k >= 0 { (l, l - k) } else { (l + k, l) };
        for i in Word::all_of_length(d, li as usize) {
            for j in Word::all_of_length(d, lj as usize) {
                out.push(Monomial::new(i.clone(), j.clone()));
            }
        }
    }
    out
}

/// Coordinates of several elements in one monomial system: every class is expanded to the
/// deepest `|J|` occurring in any of them.
fn coordinates<S: Scalar>(xs: &[CuntzElement<S>]) -> Result<(Vec<Monomial>, Vec<BTreeMap<Monomial, S>>)> {
    let nfs = xs.iter().map(|x| x.normal_form()).collect::<Result<Vec<_>>>()?;
    let mut depths: BTreeMap<i64, usize> = BTreeMap::new();
    for n in &nfs {
        for (k, v) in n.class_depths() {
            let e = depths.entry(k).or_insert(0);
            *e = (*e).max(v);
        }
    }
    let mut keys = BTreeSet::new();
    let mut maps = Vec::with_capacity(nfs.len());
    for n in &nfs {
        let e = n.expand_to(&depths)?;
        let m: BTreeMap<Monomial, S> = e.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        keys.extend(m.keys().cloned());
        maps.push(m);
    }
    Ok((keys.into_iter().collect(), maps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasaReport {
    pub d: usize,
    pub max_len: usize,
    pub span_dim: usize,
    pub generators: usize,
    pub commutant_dim: usize,
    pub diagonal_dim: usize,
    pub equals_diagonal_span: bool,
}

/// Solves `x ∘ g = g ∘ x` for all `g = M(I,I)`, `|I| ≤ L`, over the span of monomials with
/// word length `≤ L`, and compares the solution space with the diagonal span.
pub fn masa_commutant_probe<S: Field>(weights: &Weights<S::Real>, max_len: usize) -> Result<MasaReport> {
    let d = weights.d();
    let basis = span_basis(d, max_len);
    if basis.len() > MASA_SPAN_CAP {
        return Err(Error::Limit(format!(
            "span dimension {} exceeds the cap {MASA_SPAN_CAP}",
            basis.len()
        )));
    }
    let gens: Vec<CuntzElement<S>> = Word::all_up_to(d, max_len)
        .iter()
        .map(|i| CuntzElement::m(weights, i, i))
        .collect();
    // One commutator per (basis element, generator); columns are basis elements.
    let mut comms = Vec::with_capacity(basis.len() * gens.len());
    for m in &basis {
        let x = CuntzElement::monomial(weights, m.clone(), S::one());
        for g in &gens {
            comms.push(x.product(g)?.sub(&g.product(&x)?)?);
        }
    }
    let (keys, maps) = coordinates(&comms)?;
    let ng = gens.len();
    let mut rows: Dense<S> = Vec::with_capacity(ng * keys.len());
    for gi in 0..ng {
        for k in &keys {
            let row: Vec<S> = (0..basis.len())
                .map(|b| maps[b * ng + gi].get(k).cloned().unwrap_or_else(S::zero))
                .collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..basis.len())
            .map(|b| (0..basis.len()).map(|c| if b == c { S::one() } else { S::zero() }).collect())
            .collect()
    } else {
        nullspace(&rows)
    };
    let diagonal: Vec<bool> = basis.iter().map(Monomial::is_diagonal).collect();
    let diagonal_dim = diagonal.iter().filter(|&&b| b).count();
    let supported = kernel
        .iter()
        .all(|v| v.iter().zip(&diagonal).all(|(c, &diag)| diag || c.is_zero()));
    Ok(MasaReport {
        d,
        max_len,
        span_dim: basis.len(),
        generators: ng,
        commutant_dim: kernel.len(),
        diagonal_dim,
        equals_diagonal_span: supported && kernel.len() == diagonal_dim,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterFailure {
    pub condition: String,
    pub i: Word,
    pub j: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterReport {
    pub max_len: usize,
    pub failures: Vec<CenterFailure>,
    pub trials: usize,
    pub phi_commutation_failures: usize,
    /// `r_1* ∘ r_1 = 1`.
    pub witness_isometry: bool,
    /// `r_1 ∘ r_1* ≠ 1`.
    pub witness_not_unitary: bool,
}

impl CenterReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.phi_commutation_failures == 0
    }
}

/// Necessary conditions for `x` to be central: `φ(x ∘ r_J) = 0` for non-empty `J`,
/// `r_I* ∘ x ∘ r_J = δ_{I,J} x` for `|I| = |J| ≤ L`, and `φ(x∘y) = φ(y∘x)` on random `y`.
pub fn center_probe<S: RandomScalar, G: Rng + ?Sized>(
    x: &CuntzElement<S>,
    max_len: usize,
    trials: usize,
    rng: &mut G,
) -> Result<CenterReport> {
    let w = x.weights();
    let d = w.d();
    let mut failures = Vec::new();
    for j in Word::all_up_to(d, max_len).into_iter().filter(|j| !j.is_empty()) {
        if !x.product(&CuntzElement::r(w, &j))?.vacuum_state().is_zero() {
            failures.push(CenterFailure {
                condition: "phi(x r_J) = 0".into(),
                i: Word::empty(),
                j,
            });
        }
    }
    for n in 1..=max_len {
        let words = Word::all_of_length(d, n);
        for i in &words {
            let left = CuntzElement::r_star(w, i).product(x)?;
            for j in &words {
                let got = left.product(&CuntzElement::r(w, j))?;
                let want = if i == j { x.clone() } else { CuntzElement::zero(w) };
                if !got.equals(&want)? {
                    failures.push(CenterFailure {
                        condition: "r_I* x r_J = delta_IJ x".into(),
                        i: i.clone(),
                        j: j.clone(),
                    });
                }
            }
        }
    }
    let mut phi_fail = 0;
    for _ in 0..trials {
        let y = random_element::<S, _>(w, 3, max_len.max(1), rng);
        let a = x.product(&y)?.vacuum_state();
        let b = y.product(x)?.vacuum_state();
        if !a.approx_eq(&b) {
            phi_fail += 1;
        }
    }
    let r1 = CuntzElement::<S>::r(w, &letter(1));
    let one = CuntzElement::one(w);
    Ok(CenterReport {
        max_len,
        failures,
        trials,
        phi_commutation_failures: phi_fail,
        witness_isometry: r1.adjoint().product(&r1)?.equals(&one)?,
        witness_not_unitary: !r1.product(&r1.adjoint())?.equals(&one)?,
    })
}

/// `α(x) = Σ_i r_i ∘ x ∘ r_i*`, which prefixes both words: `α(M(K,L)) = Σ_i M(iK, iL)`.
pub fn alpha_endo<S: Scalar>(x: &CuntzElement<S>) -> Result<CuntzElement<S>> {
    let w = x.weights();
    let mut acc = CuntzElement::zero(w);
    for i in 1..=w.d() as u8 {
        let r = CuntzElement::r(w, &letter(i));
        acc = acc.add(&r.product(x)?.product(&r.adjoint())?)?;
    }
    Ok(acc)
}

/// The flip `v = Σ_{i,j} r_i ∘ r_j ∘ r_i* ∘ r_j* = Σ_{i,j} M(ij, ji)`.
pub fn flip<S: Scalar>(w: &Weights<S::Real>) -> Result<CuntzElement<S>> {
    let mut acc = CuntzElement::zero(w);
    for i in 1..=w.d() as u8 {
        for j in 1..=w.d() as u8 {
            let t = CuntzElement::r(w, &letter(i))
                .product(&CuntzElement::r(w, &letter(j)))?
                .product(&CuntzElement::r_star(w, &letter(i)))?
                .product(&CuntzElement::r_star(w, &letter(j)))?;
            acc = acc.add(&t)?;
        }
    }
    acc.normal_form()
}

/// `u_k = v ∘ α(v) ∘ … ∘ α^{k−1}(v)`; `u_0 = 1`.
pub fn flip_unitary<S: Scalar>(w: &Weights<S::Real>, k: usize) -> Result<CuntzElement<S>> {
    let mut u = CuntzElement::one(w);
    let mut a = flip(w)?;
    for _ in 0..k {
        u = u.product(&a)?.normal_form()?;
        a = alpha_endo(&a)?.normal_form()?;
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrStep {
    pub n: usize,
    pub gns_norm: f64,
    pub is_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrReport {
    pub word: Word,
    pub steps: Vec<DrStep>,
    /// First `n` with `α(R) = u_n ∘ R ∘ u_n*`.
    pub n0: Option<usize>,
    /// Whether the identity persists for every computed `n ≥ n0`.
    pub stays_zero: bool,
    /// Set when the term cap stopped the run early.
    pub truncated_by: Option<String>,
}

/// `δ_n = α(R) − u_n ∘ R ∘ u_n*` for `n = 1..=n_max` with `R = M(I,I)`.
pub fn dr_convergence<S: Scalar>(w: &Weights<S::Real>, i: &Word, n_max: usize) -> Result<DrReport> {
    let r = CuntzElement::<S>::m(w, i, i);
    let target = alpha_endo(&r)?;
    let mut steps = Vec::new();
    let mut truncated_by = None;
    let mut u = CuntzElement::one(w);
    let mut a = flip(w)?;
    for n in 1..=n_max {
        let step = (|| -> Result<DrStep> {
            u = u.product(&a)?.normal_form()?;
            a = alpha_endo(&a)?.normal_form()?;
            let delta = target.sub(&u.product(&r)?.product(&u.adjoint())?)?;
            let norm = delta.gns_norm_sq()?.to_c64().re.max(0.0).sqrt();
            Ok(DrStep { n, gns_norm: norm, is_zero: delta.is_zero()? })
        })();
        match step {
            Ok(s) => steps.push(s),
            Err(e @ Error::TermCap { .. }) => {
                truncated_by = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let n0 = steps.iter().find(|s| s.is_zero).map(|s| s.n);
    let stays_zero = n0.is_some_and(|n0| steps.iter().filter(|s| s.n >= n0).all(|s| s.is_zero));
    Ok(DrReport { word: i.clone(), steps, n0, stays_zero, truncated_by })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchValue {
    pub word: Word,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalProjectionReport {
    pub max_len: usize,
    /// Smallest length with two distinct words `I` having `φ(r_I* ∘ q ∘ r_I) > 0`.
    pub split_length: Option<usize>,
    pub positive_branches: Vec<BranchValue>,
    /// `φ(r_{1ⁿ}* ∘ q ∘ r_{1ⁿ})` for `n = 0..=L` along the first branch.
    pub first_branch: Vec<f64>,
}

/// Replays the diffuseness argument for a projection `q` in the diagonal.
pub fn minimal_projection_probe<S: Scalar>(q: &CuntzElement<S>, max_len: usize) -> Result<MinimalProjectionReport> {
    let w = q.weights();
    if !q.adjoint().equals(q)? {
        return Err(Error::NotProjection("q* ≠ q".into()));
    }
    if !q.product(q)?.equals(q)? {
        return Err(Error::NotProjection("q ∘ q ≠ q".into()));
    }
    if !is_diagonal(q)? {
        return Err(Error::NotProjection("q is not diagonal".into()));
    }
    let value = |i: &Word| -> Result<f64> {
        let v = CuntzElement::r_star(w, i)
            .product(q)?
            .product(&CuntzElement::r(w, i))?
            .vacuum_state();
        Ok(v.to_c64().re)
    };
    let mut split_length = None;
    let mut positive_branches = Vec::new();
    for n in 1..=max_len {
        let mut pos = Vec::new();
        for i in Word::all_of_length(w.d(), n) {
            let v = value(&i)?;
            if v > 1e-12 {
                pos.push(BranchValue { word: i, value: v });
            }
        }
        if pos.len() >= 2 {
            split_length = Some(n);
            positive_branches = pos;
            break;
        }
    }
    let first_branch = (0..=max_len)
        .map(|n| value(&Word::from_letters(&vec![1u8; n])))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinimalProjectionReport { max_len, split_length, positive_branches, first_branch })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaithfulnessReport {
    pub d: usize,
    pub max_len: usize,
    pub vectors: usize,
    pub gram_psd: bool,
    pub gram_rank: usize,
    pub operator_rank: usize,
}

/// Gram matrix of `{ξ(I,J) : |I|, |J| ≤ L}` by literal products, against the rank of the
/// same family as concrete operators compressed to `cut`.
pub fn faithfulness_probe<S: Field>(w: &Weights<S::Real>, max_len: usize, cut: usize) -> Result<FaithfulnessReport> {
    let family = crate::modular::monomial_family(w.d(), max_len);
    let elems: Vec<CuntzElement<S>> = family
        .iter()
        .map(|m| CuntzElement::monomial(w, m.clone(), S::one()))
        .collect();
    let mut gram: Dense<S> = Vec::with_capacity(elems.len());
    for a in &elems {
        let row = elems
            .iter()
            .map(|b| b.gns_inner_direct(a))
            .collect::<Result<Vec<S>>>()?;
        gram.push(row);
    }
    let ops = elems
        .iter()
        .map(|e| e.to_truncated(cut))
        .collect::<Result<Vec<_>>>()?;
    let mut keys = BTreeSet::new();
    for o in &ops {
        keys.extend(o.entries().map(|(r, c, _)| (r.clone(), c.clone())));
    }
    let mat: Dense<S> = ops
        .iter()
        .map(|o| keys.iter().map(|(r, c)| o.get(r, c)).collect())
        .collect();
    Ok(FaithfulnessReport {
        d: w.d(),
        max_len,
        vectors: elems.len(),
        gram_psd: is_psd(&gram),
        gram_rank: rank(&gram),
        operator_rank: rank(&mat),
    })
}

/// `ω_I = ω_J` for every diagonal monomial, so the diagonal sits in the centralizer.
pub fn diagonal_in_centralizer<S: Scalar>(w: &Weights<S::Real>, max_len: usize) -> Result<bool> {
    for i in Word::all_up_to(w.d(), max_len) {
        if !crate::modular::is_centralizer(&CuntzElement::<S>::m(w, &i, &i))? {
            return Ok(false);
        }
    }
    Ok(w.values().iter().all(|v| v.is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::word::WeightVector;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        Word::parse(s, 9).unwrap()
    }

    fn om() -> Weights<BigRational> {
        Arc::new(WeightVector::parse("1/3,2/3").unwrap())
    }

    type E = CuntzElement<Exact>;

    #[test]
    fn diagonal() {
        let s = om();
        let x = E::m(&s, &w("1"), &w("1")).add(&E::m(&s, &w("1"), &w("2"))).unwrap();
        assert!(diagonal_part(&x).unwrap().equals(&E::m(&s, &w("1"), &w("1"))).unwrap());
        assert!(is_diagonal(&E::m(&s, &w("12"), &w("12"))).unwrap());
        assert!(!is_diagonal(&x).unwrap());
        let one = E::m(&s, &w("1"), &w("1")).add(&E::m(&s, &w("2"), &w("2"))).unwrap();
        assert!(is_diagonal(&one).unwrap());
    }

    #[test]
    fn masa() {
        let r = masa_commutant_probe::<Exact>(&om(), 2).unwrap();
        assert_eq!((r.span_dim, r.diagonal_dim), (40, 4));
        assert!(r.equals_diagonal_span, "{r:?}");
    }

    #[test]
    fn center() {
        let s = om();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = center_probe(&E::one(&s), 2, 5, &mut rng).unwrap();
        assert!(r.all_pass() && r.witness_isometry && r.witness_not_unitary);
        let r = center_probe(&E::m(&s, &w("1"), &w("1")), 1, 5, &mut rng).unwrap();
        let bad: Vec<_> = r.failures.iter().map(|f| (f.i.to_string(), f.j.to_string())).collect();
        assert!(bad.contains(&("1".into(), "1".into())));
        assert!(!bad.contains(&("1".into(), "2".into())));
    }

    #[test]
    fn alpha_and_flip() {
        let s = om();
        assert!(alpha_endo(&E::one(&s)).unwrap().equals(&E::one(&s)).unwrap());
        let a = alpha_endo(&E::m(&s, &w("1"), &w("1"))).unwrap();
        let want = E::m(&s, &w("11"), &w("11")).add(&E::m(&s, &w("21"), &w("21"))).unwrap();
        assert!(a.equals(&want).unwrap());
        for k in 1..=3 {
            let u = flip_unitary::<Exact>(&s, k).unwrap();
            assert!(u.adjoint().product(&u).unwrap().equals(&E::one(&s)).unwrap());
        }
    }

    #[test]
    fn projections() {
        let s = om();
        let r = minimal_projection_probe(&E::one(&s), 2).unwrap();
        assert_eq!(r.split_length, Some(1));
        let q = E::m(&s, &w("1"), &w("1"));
        let r = minimal_projection_probe(&q, 3).unwrap();
        assert_eq!(r.first_branch[1], 1.0);
        assert!(matches!(
            minimal_projection_probe(&E::m(&s, &w("1"), &w("2")), 2),
            Err(Error::NotProjection(_))
        ));
    }

    #[test]
    fn faithful() {
        let r = faithfulness_probe::<Exact>(&om(), 1, 3).unwrap();
        assert!(r.gram_psd);
        assert_eq!(r.gram_rank, r.operator_rank);
        assert_eq!(r.gram_rank, span_basis(2, 1).len());
    }
}
