//! Properties of the symbolic monomial algebra, cross-checked against the literal product
//! and the truncated Fock realization.

use std::sync::Arc;

use poisson_boundary::cuntz::{CuntzElement, Monomial, Weights};
use poisson_boundary::random::{random_element, random_weights};
use poisson_boundary::scalar::{Exact, Scalar};
use poisson_boundary::word::Word;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type El = CuntzElement<Exact>;

fn session(d: usize, seed: u64) -> (Weights<num_rational::BigRational>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Arc::new(random_weights(d, &mut rng));
    (w, rng)
}

fn w1(i: u8) -> Word {
    Word::from_letters(&[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(d in 2usize..=3, seed: u64) {
        let (w, mut rng) = session(d, seed);
        let x: El = random_element(&w, 3, 2, &mut rng);
        let y: El = random_element(&w, 3, 2, &mut rng);
        let z: El = random_element(&w, 3, 2, &mut rng);
        let a = x.product(&y).unwrap().product(&z).unwrap();
        let b = x.product(&y.product(&z).unwrap()).unwrap();
        prop_assert!(a.equals(&b).unwrap());
    }

    #[test]
    fn adjoint_reverses_products(d in 2usize..=3, seed: u64) {
        let (w, mut rng) = session(d, seed);
        let x: El = random_element(&w, 3, 2, &mut rng);
        let y: El = random_element(&w, 3, 2, &mut rng);
        let lhs = x.product(&y).unwrap().adjoint();
        let rhs = y.adjoint().product(&x.adjoint()).unwrap();
        prop_assert!(lhs.equals(&rhs).unwrap());
        prop_assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn state_is_positive_and_hermitian(d in 2usize..=3, seed: u64) {
        let (w, mut rng) = session(d, seed);
        let x: El = random_element(&w, 4, 2, &mut rng);
        let n = x.gns_norm_sq().unwrap();
        prop_assert!(num_traits::Zero::is_zero(&n.im));
        prop_assert!(n.re >= num_traits::zero());
        prop_assert_eq!(x.is_zero().unwrap(), x.normal_form().unwrap().is_empty());
        prop_assert_eq!(x.adjoint().vacuum_state(), x.vacuum_state().conj());
    }

    #[test]
    fn fast_inner_product_matches_literal(d in 2usize..=3, seed: u64, depth in 1usize..=3) {
        let (w, mut rng) = session(d, seed);
        let x: El = random_element(&w, 4, 2, &mut rng);
        // Pad y with a zero written as M(I,J) − Σ_K M(IK,JK), which pushes it past the
        // literal-product threshold for larger depths.
        let y: El = random_element(&w, 4, 2, &mut rng);
        let m = Monomial::new(w1(1), Word::empty());
        let mut terms = vec![(m.clone(), Exact::one())];
        for k in Word::all_of_length(d, depth) {
            terms.push((Monomial::new(m.i.concat(&k), m.j.concat(&k)), Exact::one().neg()));
        }
        let y = y.add(&CuntzElement::from_terms(&w, terms).unwrap()).unwrap();
        prop_assert_eq!(x.gns_inner(&y).unwrap(), x.gns_inner_direct(&y).unwrap());
        prop_assert_eq!(y.gns_inner(&y).unwrap(), y.gns_inner_direct(&y).unwrap());
    }

    #[test]
    fn normal_form_is_idempotent_and_equal(d in 2usize..=3, seed: u64) {
        let (w, mut rng) = session(d, seed);
        let x: El = random_element(&w, 5, 3, &mut rng);
        let n = x.normal_form().unwrap();
        prop_assert_eq!(n.normal_form().unwrap(), n.clone());
        prop_assert!(n.equals(&x).unwrap());
    }

    #[test]
    fn equal_elements_have_equal_normal_forms(d in 2usize..=3, seed: u64) {
        let (w, mut rng) = session(d, seed);
        let x: El = random_element(&w, 3, 2, &mut rng);
        // One-level expansion of every term is the same element.
        let mut terms = Vec::new();
        for (m, c) in x.terms() {
            for a in 1..=d as u8 {
                terms.push((Monomial::new(m.i.append(a), m.j.append(a)), c.clone()));
            }
        }
        let y = CuntzElement::from_terms(&w, terms).unwrap();
        prop_assert!(x.equals(&y).unwrap());
        prop_assert_eq!(x.normal_form().unwrap(), y.normal_form().unwrap());
    }

    #[test]
    fn state_rules_on_monomials(d in 2usize..=3, seed: u64, i in 0usize..40, j in 0usize..40) {
        let (w, _) = session(d, seed);
        let words = Word::all_up_to(d, 3);
        let (i, j) = (&words[i % words.len()], &words[j % words.len()]);
        let x = El::m(&w, i, j);
        let want = if i == j { Exact::from_real(&w.word_weight(j)) } else { Exact::zero() };
        prop_assert_eq!(x.vacuum_state(), want.clone());
        let cut = i.len().max(j.len());
        let t = x.to_truncated(cut).unwrap();
        prop_assert_eq!(t.get(&Word::empty(), &Word::empty()), want);
    }
}

#[test]
fn cuntz_relations_hold_symbolically() {
    for d in 2..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let w = Arc::new(random_weights(d, &mut rng));
        let one = El::one(&w);
        let mut sum = El::zero(&w);
        for i in 1..=d as u8 {
            sum = sum.add(&El::m(&w, &w1(i), &w1(i))).unwrap();
            for j in 1..=d as u8 {
                let p = El::r_star(&w, &w1(i)).product(&El::r(&w, &w1(j))).unwrap();
                let want = if i == j { one.clone() } else { El::zero(&w) };
                assert!(p.equals(&want).unwrap(), "r_{i}* r_{j}");
            }
        }
        assert!(sum.sub(&one).unwrap().is_zero().unwrap());
    }
}

#[test]
fn products_of_monomials_follow_the_contraction_rule() {
    let w = Arc::new(poisson_boundary::word::WeightVector::parse("1/3,2/3").unwrap());
    let w12 = Word::from_letters(&[1, 2]);
    let w21 = Word::from_letters(&[2, 1]);
    // r_12* r_1 = r_2* r_1* r_1 = r_2*, so M(1,12) M(1,()) = M(1,2).
    let a = El::m(&w, &w1(1), &w12);
    let b = El::m(&w, &w1(1), &Word::empty());
    assert_eq!(a.product(&b).unwrap(), El::m(&w, &w1(1), &w1(2)));
    // r_1* r_2 = 0.
    let c = El::m(&w, &Word::empty(), &w1(1));
    let e = El::m(&w, &w1(2), &Word::empty());
    assert!(c.product(&e).unwrap().is_empty());
    // r_2* r_21 = r_2* r_2 r_1 = r_1.
    let f = El::m(&w, &Word::empty(), &w1(2));
    let g = El::m(&w, &w21, &Word::empty());
    assert_eq!(f.product(&g).unwrap(), El::m(&w, &w1(1), &Word::empty()));
}

#[test]
fn element_json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = Arc::new(random_weights(3, &mut rng));
    let x: El = random_element(&w, 6, 3, &mut rng);
    let text = serde_json::to_string(&x.to_json()).unwrap();
    let back = El::from_json(&serde_json::from_str(&text).unwrap(), &w).unwrap();
    assert_eq!(back, x);
}
