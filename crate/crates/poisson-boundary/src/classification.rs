//! Type classification of the boundary from the weight vector.
//!
//! The invariant is the closed multiplicative subgroup `G ⊂ ℝ₊*` generated by the
//! weights. It is either cyclic, `G = {λⁿ}`, giving type III_λ, or dense, giving III_1.
//! Type III_0 cannot occur for finitely many weights, so [`VerdictKind`] has no arm for it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{factor_rational, from_exponents};
use crate::error::{Error, Result};
use crate::scalar::{rational_repr, Real};
use crate::word::WeightVector;

/// Default tolerance for float-mode commensurability.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest continued-fraction denominator tried in float mode.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    #[serde(rename = "III_lambda")]
    IIILambda,
    #[serde(rename = "III_one")]
    IIIOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeVerdict {
    pub kind: VerdictKind,
    /// `λ` as a fraction in exact mode, as a decimal in float mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_f64: Option<f64>,
    #[serde(skip)]
    pub lambda_exact: Option<BigRational>,
    /// Letter (as a string) to `k_i` with `ω_i = λ^{k_i}`.
    pub generator_exponents: BTreeMap<String, u32>,
    pub commensurability_witness: String,
    /// Set for float-mode verdicts, which are toleranced rather than exact.
    pub numeric: bool,
    /// Float mode: `|Σ λ^{k_i} − 1|` and, if supplied, `|p(λ)|` for the minimal polynomial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub max_weight_residual: f64,
    pub sum_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_poly_residual: Option<f64>,
}

impl TypeVerdict {
    pub fn exponents(&self) -> Vec<u32> {
        let mut v: Vec<(u8, u32)> = self
            .generator_exponents
            .iter()
            .map(|(k, e)| (k.parse().unwrap_or(0), *e))
            .collect();
        v.sort();
        v.into_iter().map(|(_, e)| e).collect()
    }

    fn exponent_map(k: &[u32]) -> BTreeMap<String, u32> {
        k.iter()
            .enumerate()
            .map(|(i, &e)| ((i + 1).to_string(), e))
            .collect()
    }
}

/// Exact classification via prime-exponent vectors.
///
/// `ω_i = λ^{k_i}` for a rational `λ` iff all prime-exponent vectors are integer multiples
/// of one primitive vector `v`. The group generated is then `{μ^{g n}}` with `μ = ∏ p^{v_p}`
/// and `g = gcd(k_i)`, so the returned `λ = μ^g` and the exponents are `k_i / g`.
pub fn classify_exact(w: &WeightVector<BigRational>) -> Result<TypeVerdict> {
    let vectors: Vec<BTreeMap<BigInt, i64>> = w.values().iter().map(factor_rational).collect();
    let first = &vectors[0];
    let content = first.values().fold(0i64, |g, e| g.gcd(e));
    // ω_1 < 1, so at least one exponent is non-zero; orient v so that μ < 1.
    let mut v: BTreeMap<BigInt, i64> = first.iter().map(|(p, e)| (p.clone(), e / content)).collect();
    if from_exponents(&v) > num_traits::one::<BigRational>() {
        v.values_mut().for_each(|e| *e = -*e);
    }
    let mut ks = Vec::with_capacity(vectors.len());
    for (idx, e) in vectors.iter().enumerate() {
        match multiple_of(e, &v) {
            Some(k) if k > 0 => ks.push(k),
            _ => {
                return Ok(TypeVerdict {
                    kind: VerdictKind::IIIOne,
                    lambda: None,
                    lambda_f64: None,
                    lambda_exact: None,
                    generator_exponents: BTreeMap::new(),
                    commensurability_witness: format!(
                        "log ω_1 = log {} and log ω_{} = log {} are rationally independent \
                         (prime-exponent vectors are not proportional)",
                        rational_repr(&w.values()[0]),
                        idx + 1,
                        rational_repr(&w.values()[idx])
                    ),
                    numeric: false,
                    certificate: None,
                })
            }
        }
    }
    let g = ks.iter().fold(0i64, |g, k| g.gcd(k));
    let mu = from_exponents(&v);
    let lambda = num_traits::pow(mu.clone(), g as usize);
    let ks: Vec<u32> = ks.iter().map(|k| (k / g) as u32).collect();
    for (wi, &k) in w.values().iter().zip(&ks) {
        if num_traits::pow(lambda.clone(), k as usize) != *wi {
            return Err(Error::Inconsistency(format!(
                "λ = {} does not reproduce weight {}",
                rational_repr(&lambda),
                rational_repr(wi)
            )));
        }
    }
    let check = rational_lambda_check(&lambda);
    if !check.admissible {
        return Err(Error::Inconsistency(format!(
            "classifier produced λ = {} whose numerator is not 1",
            rational_repr(&lambda)
        )));
    }
    Ok(TypeVerdict {
        kind: VerdictKind::IIILambda,
        lambda: Some(rational_repr(&lambda)),
        lambda_f64: Some(Real::to_f64(&lambda)),
        lambda_exact: Some(lambda.clone()),
        generator_exponents: TypeVerdict::exponent_map(&ks),
        commensurability_witness: format!(
            "every prime-exponent vector is a multiple of that of {}; exponent gcd {}",
            rational_repr(&mu),
            g
        ),
        numeric: false,
        certificate: None,
    })
}

/// `Some(k)` with `e = k·v`, if it exists.
fn multiple_of(e: &BTreeMap<BigInt, i64>, v: &BTreeMap<BigInt, i64>) -> Option<i64> {
    if e.keys().ne(v.keys()) {
        return None;
    }
    let (p0, v0) = v.iter().next()?;
    let e0 = e[p0];
    if e0 % v0 != 0 {
        return None;
    }
    let k = e0 / v0;
    v.iter().all(|(p, vp)| e[p] == k * vp).then_some(k)
}

/// Best rational approximation `p/q` of `x` with `q ≤ max_q` satisfying
/// `q²·|x − p/q| ≤ tol`, scanning the continued-fraction convergents.
///
/// The scaled criterion matters: every real has convergents with `|x − p/q| < 1/q²`, so a
/// plain `|x − p/q| ≤ tol` test would call every ratio commensurable once `q` is large.
pub fn commensurable_ratio(x: f64, tol: f64, max_q: i64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_q {
            return None;
        }
        let err = (x - h2 as f64 / k2 as f64).abs();
        if (k2 as f64) * (k2 as f64) * err <= tol {
            return Some((h2, k2));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}

/// Float classification: tests commensurability of `−log ω_i` by continued fractions.
pub fn classify_float(w: &WeightVector<f64>, tol: f64) -> Result<TypeVerdict> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let a: Vec<f64> = w.values().iter().map(|v| -v.ln()).collect();
    let mut fracs = Vec::with_capacity(a.len());
    for (i, ai) in a.iter().enumerate() {
        match commensurable_ratio(ai / a[0], tol, MAX_DENOMINATOR) {
            Some(pq) => fracs.push(pq),
            None => {
                return Ok(TypeVerdict {
                    kind: VerdictKind::IIIOne,
                    lambda: None,
                    lambda_f64: None,
                    lambda_exact: None,
                    generator_exponents: BTreeMap::new(),
                    commensurability_witness: format!(
                        "log ω_{} / log ω_1 = {:.12} has no convergent with denominator ≤ {} \
                         within tolerance {:e}",
                        i + 1,
                        ai / a[0],
                        MAX_DENOMINATOR,
                        tol
                    ),
                    numeric: true,
                    certificate: None,
                })
            }
        }
    }
    let q = fracs.iter().fold(1i64, |l, (_, q)| l.lcm(q));
    let n: Vec<i64> = fracs.iter().map(|(p, qi)| p * (q / qi)).collect();
    let g = n.iter().fold(0i64, |g, k| g.gcd(k));
    let ks: Vec<u32> = n.iter().map(|k| (k / g) as u32).collect();
    let measure = a[0] * g as f64 / q as f64;
    let lambda = (-measure).exp();
    let mut max_res = 0.0f64;
    let mut sum = 0.0;
    for (wi, &k) in w.values().iter().zip(&ks) {
        let pred = lambda.powi(k as i32);
        sum += pred;
        let rel = (pred / wi - 1.0).abs();
        max_res = max_res.max(rel);
        if rel > tol * (1.0 + k as f64) {
            return Err(Error::Inconsistency(format!(
                "λ = {lambda} with exponent {k} misses weight {wi} (relative error {rel:e})"
            )));
        }
    }
    let min_poly_residual = w.min_poly().map(|c| {
        c.iter()
            .rev()
            .fold(0.0, |acc, &ci| acc * lambda + ci as f64)
            .abs()
    });
    Ok(TypeVerdict {
        kind: VerdictKind::IIILambda,
        lambda: Some(format!("{lambda:.15}")),
        lambda_f64: Some(lambda),
        lambda_exact: None,
        generator_exponents: TypeVerdict::exponent_map(&ks),
        commensurability_witness: format!(
            "log ω_i / log ω_1 = n_i / {q} with n = {n:?}; common measure {measure:.15}"
        ),
        numeric: true,
        certificate: Some(Certificate {
            max_weight_residual: max_res,
            sum_residual: (sum - 1.0).abs(),
            min_poly_residual,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaCheck {
    pub admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
}

/// Whether a rational `λ ∈ (0,1)` has the form `1/k`. Only such values arise from weights.
pub fn rational_lambda_check(lambda: &BigRational) -> LambdaCheck {
    let in_range = Signed::is_positive(lambda) && *lambda < num_traits::one::<BigRational>();
    if in_range && lambda.numer().is_one() {
        LambdaCheck {
            admissible: true,
            k: Some(lambda.denom().to_string()),
        }
    } else {
        LambdaCheck { admissible: false, k: None }
    }
}

/// All nondecreasing `(k_1, …, k_d)` with `k_i ≤ bound`, `Σ λ^{k_i} = 1` and `gcd = 1`.
pub fn exponent_decomposition<R: Real>(lambda: &R, d: usize, bound: u32) -> Result<Vec<Vec<u32>>> {
    let lf = lambda.to_f64();
    if !(lf > 0.0 && lf < 1.0) {
        return Err(Error::Domain(format!("λ = {} is not in (0, 1)", lambda.to_repr())));
    }
    if d == 0 || bound == 0 {
        return Err(Error::Domain("need d ≥ 1 and bound ≥ 1".into()));
    }
    let powers: Vec<R> = (0..=bound).map(|k| lambda.powi(k)).collect();
    let pf: Vec<f64> = powers.iter().map(Real::to_f64).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    search(&powers, &pf, d, bound, 1, R::zero(), &mut cur, &mut out);
    if out.is_empty() {
        return Err(Error::NoSolutionWithinBound(bound));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search<R: Real>(
    powers: &[R],
    pf: &[f64],
    d: usize,
    bound: u32,
    start: u32,
    sum: R,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    const SLACK: f64 = 1e-9;
    let left = (d - cur.len()) as f64;
    if cur.len() == d {
        if sum.approx_eq(&R::one()) && cur.iter().fold(0u32, |g, k| g.gcd(k)) == 1 {
            out.push(cur.clone());
        }
        return;
    }
    let need = 1.0 - sum.to_f64();
    for k in start..=bound {
        // The remaining slots contribute at most left·λ^k and at least left·λ^bound.
        if left * pf[k as usize] < need - SLACK {
            break;
        }
        if left * pf[bound as usize] > need + SLACK {
            break;
        }
        cur.push(k);
        search(powers, pf, d, bound, k, sum.add(&powers[k as usize]), cur, out);
        cur.pop();
    }
}

/// `n` with `r = λⁿ`, if it exists (exact).
pub fn integer_log(r: &BigRational, lambda: &BigRational) -> Option<i64> {
    if r.is_one() {
        return Some(0);
    }
    let e = factor_rational(r);
    let v = factor_rational(lambda);
    if v.is_empty() {
        return None;
    }
    multiple_of(&e, &v)
}

/// `log r / log λ` rounded, with its distance from the nearest integer.
pub fn float_log_ratio(r: f64, lambda: f64) -> (f64, f64) {
    let x = r.ln() / lambda.ln();
    (x, (x - x.round()).abs())
}

/// Tiny helper for tests and reports: the exact `k` in `λ = 1/k` as an integer.
pub fn lambda_denominator(lambda: &BigRational) -> Option<u64> {
    if lambda.numer().is_one() {
        lambda.denom().to_u64()
    } else {
        None
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::IIILambda => "III_lambda",
            VerdictKind::IIIOne => "III_one",
        })
    }
}
