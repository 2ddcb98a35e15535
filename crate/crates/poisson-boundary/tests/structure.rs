use std::sync::Arc;

use num_rational::BigRational;
use poisson_boundary::cuntz::{CuntzElement, Weights};
use poisson_boundary::random::{random_element, random_weights};
use poisson_boundary::scalar::Exact;
use poisson_boundary::structure::{
    alpha_endo, center_probe, diagonal_in_centralizer, diagonal_part, dr_convergence, faithfulness_probe, flip,
    flip_unitary, is_diagonal, masa_commutant_probe, minimal_projection_probe, span_basis,
};
use poisson_boundary::word::{WeightVector, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type El = CuntzElement<Exact>;

fn weights(s: &str) -> Weights<BigRational> {
    Arc::new(WeightVector::parse(s).unwrap())
}

#[test]
fn diagonal_masa_is_maximal_abelian_in_the_span() {
    for s in ["1/3,2/3", "1/2,1/2"] {
        let rep = masa_commutant_probe::<Exact>(&weights(s), 2).unwrap();
        assert!(rep.equals_diagonal_span, "{rep:?}");
        assert_eq!(rep.commutant_dim, rep.diagonal_dim);
    }
    let rep = masa_commutant_probe::<Exact>(&weights("1/6,1/3,1/2"), 1).unwrap();
    assert!(rep.equals_diagonal_span, "{rep:?}");
}

#[test]
fn diagonal_part_drops_off_diagonal_terms() {
    let w = weights("1/3,2/3");
    let m11 = El::m(&w, &Word::letter(1), &Word::letter(1));
    let m12 = El::m(&w, &Word::letter(1), &Word::letter(2));
    assert!(diagonal_part(&m11.add(&m12).unwrap()).unwrap().equals(&m11).unwrap());
    assert!(is_diagonal(&m11).unwrap());
    assert!(!is_diagonal(&m12).unwrap());
    assert!(diagonal_in_centralizer::<Exact>(&w, 2).unwrap());
}

#[test]
fn faithfulness_ranks_agree() {
    let w = weights("1/3,2/3");
    let rep = faithfulness_probe::<Exact>(&w, 2, 4).unwrap();
    assert!(rep.gram_psd);
    assert_eq!(rep.gram_rank, rep.operator_rank);
    assert_eq!(rep.gram_rank, span_basis(2, 2).len());
}

#[test]
fn dr_identity_holds_from_the_word_length() {
    let w = weights("1/3,2/3");
    for i in Word::all_up_to(2, 2).into_iter().filter(|i| !i.is_empty()) {
        let rep = dr_convergence::<Exact>(&w, &i, 6).unwrap();
        assert_eq!(rep.n0, Some(i.len()), "{i}");
        assert!(rep.stays_zero);
        assert!(rep.steps.iter().filter(|s| s.n < i.len()).all(|s| s.gns_norm > 0.0));
    }
}

#[test]
fn flip_unitaries_are_unitary() {
    let w = weights("1/6,1/3,1/2");
    let one = El::one(&w);
    let v = flip::<Exact>(&w).unwrap();
    assert!(v.product(&v).unwrap().equals(&one).unwrap());
    for k in 0..=2 {
        let u = flip_unitary::<Exact>(&w, k).unwrap();
        assert!(u.adjoint().product(&u).unwrap().equals(&one).unwrap());
        assert!(u.product(&u.adjoint()).unwrap().equals(&one).unwrap());
    }
}

#[test]
fn center_probe_separates_scalars_from_projections() {
    let w = weights("1/3,2/3");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rep = center_probe(&El::one(&w), 2, 10, &mut rng).unwrap();
    assert!(rep.all_pass() && rep.witness_isometry && rep.witness_not_unitary);
    let m11 = El::m(&w, &Word::letter(1), &Word::letter(1));
    let rep = center_probe(&m11, 1, 0, &mut rng).unwrap();
    assert!(rep.failures.iter().any(|f| f.i == Word::letter(1) && f.j == Word::letter(1)));
}

#[test]
fn diagonal_projections_split() {
    let w = weights("1/3,2/3");
    let rep = minimal_projection_probe(&El::one(&w), 2).unwrap();
    assert_eq!(rep.split_length, Some(1));
    let m11 = El::m(&w, &Word::letter(1), &Word::letter(1));
    let rep = minimal_projection_probe(&m11, 2).unwrap();
    assert_eq!(rep.split_length, Some(2));
    assert!(rep.first_branch.iter().all(|&v| v > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn alpha_is_a_unital_star_endomorphism(d in 2usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Arc::new(random_weights(d, &mut rng));
        let x: El = random_element(&w, 3, 2, &mut rng);
        let y: El = random_element(&w, 3, 2, &mut rng);
        let lhs = alpha_endo(&x.product(&y).unwrap()).unwrap();
        let rhs = alpha_endo(&x).unwrap().product(&alpha_endo(&y).unwrap()).unwrap();
        prop_assert!(lhs.equals(&rhs).unwrap());
        prop_assert!(alpha_endo(&x.adjoint()).unwrap().equals(&alpha_endo(&x).unwrap().adjoint()).unwrap());
        prop_assert!(alpha_endo(&El::one(&w)).unwrap().equals(&El::one(&w)).unwrap());
    }
}
