//! Seeded generators for test instances: weights, words, monomial combinations, sparse
//! truncated operators and small scalars.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cuntz::{CuntzElement, Monomial, Weights};
use crate::fock::TruncatedOperator;
use crate::scalar::{gauss, Exact, Field, Float};
use crate::word::{WeightVector, Word};

/// Scalars with a generator of small random values.
pub trait RandomScalar: Field {
    fn random_small<G: Rng + ?Sized>(rng: &mut G) -> Self;
}

impl RandomScalar for Exact {
    fn random_small<G: Rng + ?Sized>(rng: &mut G) -> Self {
        loop {
            let c = gauss(
                rng.gen_range(-3..=3),
                rng.gen_range(1..=4),
                rng.gen_range(-2..=2),
                rng.gen_range(1..=3),
            );
            if !crate::scalar::Scalar::is_zero(&c) {
                return c;
            }
        }
    }
}

impl RandomScalar for Float {
    fn random_small<G: Rng + ?Sized>(rng: &mut G) -> Self {
        Float::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

/// Random exact weights `n_i / Σ n` with `n_i ∈ [1, 9]`.
pub fn random_weights<G: Rng + ?Sized>(d: usize, rng: &mut G) -> WeightVector<BigRational> {
    loop {
        let n: Vec<i64> = (0..d).map(|_| rng.gen_range(1..=9)).collect();
        let total: i64 = n.iter().sum();
        let values = n.iter().map(|&k| BigRational::new(k.into(), total.into())).collect();
        if let Ok(w) = WeightVector::new(values) {
            return w;
        }
    }
}

pub fn random_word<G: Rng + ?Sized>(d: usize, max_len: usize, rng: &mut G) -> Word {
    let n = rng.gen_range(0..=max_len);
    Word::from_letters(&(0..n).map(|_| rng.gen_range(1..=d as u8)).collect::<Vec<_>>())
}

pub fn random_monomial<G: Rng + ?Sized>(d: usize, max_len: usize, rng: &mut G) -> Monomial {
    Monomial::new(random_word(d, max_len, rng), random_word(d, max_len, rng))
}

/// A combination of up to `terms` random monomials with small coefficients.
pub fn random_element<S: RandomScalar, G: Rng + ?Sized>(
    weights: &Weights<S::Real>,
    terms: usize,
    max_len: usize,
    rng: &mut G,
) -> CuntzElement<S> {
    let d = weights.d();
    let n = rng.gen_range(1..=terms.max(1));
    let items: Vec<(Monomial, S)> = (0..n)
        .map(|_| (random_monomial(d, max_len, rng), S::random_small(rng)))
        .collect();
    CuntzElement::from_terms(weights, items).expect("letters are in range")
}

/// A sparse operator with `nnz` random entries on words of length `≤ cut`.
pub fn random_truncated<S: RandomScalar, G: Rng + ?Sized>(
    d: usize,
    cut: usize,
    nnz: usize,
    rng: &mut G,
) -> TruncatedOperator<S> {
    let words = Word::all_up_to(d, cut);
    let raw = (0..nnz)
        .map(|_| {
            let r = words.choose(rng).expect("non-empty").clone();
            let c = words.choose(rng).expect("non-empty").clone();
            (r, c, S::random_small(rng))
        })
        .collect();
    TruncatedOperator::from_entries(d, cut, raw).expect("entries are within the cut")
}
