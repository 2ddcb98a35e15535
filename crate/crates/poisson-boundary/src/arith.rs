//! Prime factorization of rationals, shared by the radical representation and the
//! classifier.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 1_000_000;

/// Factors `|n| ≥ 1` by trial division up to 10⁶. A cofactor left over after the search is
/// below 10¹² and therefore prime; anything larger is kept as a single opaque factor.
pub fn factorize(n: &BigInt) -> BTreeMap<BigInt, i64> {
    let mut out = BTreeMap::new();
    let mut m = n.abs();
    if m.is_zero() {
        return out;
    }
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            m /= &bp;
            *out.entry(bp.clone()).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        *out.entry(m).or_insert(0) += 1;
    }
    out
}

/// Prime-exponent vector of a positive rational: `q = ∏ p^{e_p}` with `e_p ∈ ℤ`.
pub fn factor_rational(q: &BigRational) -> BTreeMap<BigInt, i64> {
    let mut out = factorize(q.numer());
    for (p, e) in factorize(q.denom()) {
        *out.entry(p).or_insert(0) -= e;
    }
    out.retain(|_, e| *e != 0);
    out
}

/// `∏ p^{e_p}` for integer exponents.
pub fn from_exponents(exps: &BTreeMap<BigInt, i64>) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, &e) in exps {
        let pw = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
        if e >= 0 {
            num *= pw;
        } else {
            den *= pw;
        }
    }
    BigRational::new(num, den)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn gcd_u32_slice(v: &[u32]) -> u32 {
    v.iter().fold(0u32, |g, &k| g.gcd(&k))
}

/// Floor of a rational as an integer.
pub fn floor_i64(q: &BigRational) -> i64 {
    q.floor().to_integer().to_i64().expect("exponent fits in i64")
}
