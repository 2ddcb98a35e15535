use std::sync::Arc;

use poisson_boundary::cuntz::CuntzElement;
use poisson_boundary::modular::{
    delta_apply, is_centralizer, modular_conjugation, monomial_family, phi_commutation_failures, s_operator, sigma_t,
    spectrum_sample, DeltaPower, GnsVector, Symbolic,
};
use poisson_boundary::random::{random_element, random_weights};
use poisson_boundary::scalar::{rat, Exact, Float, Scalar};
use poisson_boundary::word::{WeightVector, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type El = CuntzElement<Exact>;

fn lift(x: &El) -> CuntzElement<Symbolic> {
    x.map_scalar(|c| Symbolic::from(c.clone()))
}

fn to_float(x: &El) -> CuntzElement<Float> {
    let values = x.weights().values().iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap()).collect();
    let w = Arc::new(WeightVector::new(values).unwrap());
    CuntzElement::from_terms(&w, x.terms().map(|(m, c)| (m.clone(), c.to_c64()))).unwrap()
}

#[test]
fn delta_scales_monomials_by_weight_ratios() {
    let w = Arc::new(WeightVector::parse("1/3,2/3").unwrap());
    let one = rat(1, 1);
    for m in monomial_family(2, 2) {
        let v = GnsVector::new(lift(&El::monomial(&w, m.clone(), Exact::one())));
        let got = delta_apply(&v, &DeltaPower::Real(one.clone()));
        let want = w.word_weight(&m.i) / w.word_weight(&m.j);
        assert_eq!(got.element().coefficient(&m).as_exact(), Some(Exact::from_real(&want)), "{m}");
    }
}

#[test]
fn s_is_j_delta_half_on_all_short_vectors() {
    let w = Arc::new(WeightVector::parse("1/6,1/3,1/2").unwrap());
    let half = DeltaPower::Real(rat(1, 2));
    for m in monomial_family(3, 2) {
        let v = GnsVector::new(lift(&El::monomial(&w, m.clone(), Exact::one())));
        assert!(modular_conjugation(&delta_apply(&v, &half)).equals(&s_operator(&v)).unwrap(), "{m}");
        assert!(modular_conjugation(&modular_conjugation(&v)).equals(&v).unwrap());
    }
}

#[test]
fn centralizer_is_detected_by_weight_balance() {
    let w = Arc::new(WeightVector::parse("1/3,2/3").unwrap());
    let words = Word::all_up_to(2, 2);
    let probes: Vec<El> = monomial_family(2, 2)
        .into_iter()
        .map(|m| El::monomial(&w, m, Exact::one()))
        .collect();
    for i in &words {
        for j in &words {
            let x = El::m(&w, i, j);
            let balanced = w.word_weight(i) == w.word_weight(j);
            assert_eq!(is_centralizer(&x).unwrap(), balanced, "M({i},{j})");
            if balanced {
                assert!(phi_commutation_failures(&x, &probes).unwrap().is_empty());
            }
        }
    }
    // Distinct words with equal weight: ω_{12} = ω_{21}.
    let x = El::m(&w, &Word::from_letters(&[1, 2]), &Word::from_letters(&[2, 1]));
    assert!(is_centralizer(&x).unwrap());
}

#[test]
fn non_central_monomial_breaks_the_trace_property() {
    let w = Arc::new(WeightVector::parse("1/3,2/3").unwrap());
    let x = El::m(&w, &Word::letter(1), &Word::letter(2));
    let probes = vec![El::m(&w, &Word::letter(2), &Word::letter(1))];
    assert_eq!(phi_commutation_failures(&x, &probes).unwrap(), vec![0]);
}

#[test]
fn spectrum_of_uniform_weights() {
    let w: WeightVector<num_rational::BigRational> = WeightVector::uniform(2).unwrap();
    let s = spectrum_sample(&w, 2).unwrap();
    assert_eq!(s, vec![rat(1, 4), rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1)]);
}

fn session(d: usize, seed: u64) -> (El, El, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Arc::new(random_weights(d, &mut rng));
    let x = random_element(&w, 3, 2, &mut rng);
    let y = random_element(&w, 3, 2, &mut rng);
    let s = (seed % 1000) as f64 / 250.0 - 2.0;
    let t = (seed / 1000 % 1000) as f64 / 300.0 - 1.5;
    (x, y, s, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sigma_is_a_one_parameter_group(d in 2usize..=3, seed: u64) {
        let (x, _, s, t) = session(d, seed);
        let xf = to_float(&x);
        let lhs = sigma_t(&sigma_t(&xf, t), s);
        prop_assert!(lhs.equals(&sigma_t(&xf, s + t)).unwrap());
        prop_assert!(sigma_t(&sigma_t(&xf, t), -t).equals(&xf).unwrap());
    }

    #[test]
    fn sigma_is_a_state_preserving_star_automorphism(d in 2usize..=3, seed: u64) {
        let (x, y, t, _) = session(d, seed);
        let (xm, ym) = (lift(&x), lift(&y));
        let prod = sigma_t(&xm.product(&ym).unwrap(), t);
        prop_assert!(prod.equals(&sigma_t(&xm, t).product(&sigma_t(&ym, t)).unwrap()).unwrap());
        prop_assert!(sigma_t(&xm.adjoint(), t).equals(&sigma_t(&xm, t).adjoint()).unwrap());
        prop_assert_eq!(sigma_t(&xm, t).vacuum_state(), xm.vacuum_state());
    }

    #[test]
    fn kms_condition_at_minus_i(d in 2usize..=3, seed: u64) {
        let (x, y, _, _) = session(d, seed);
        let (xm, ym) = (lift(&x), lift(&y));
        let dy = delta_apply(&GnsVector::new(ym.clone()), &DeltaPower::Real(rat(1, 1)));
        let lhs = xm.product(dy.element()).unwrap().vacuum_state();
        let rhs = ym.product(&xm).unwrap().vacuum_state();
        prop_assert!(lhs.approx_eq(&rhs));
    }

    #[test]
    fn imaginary_delta_powers_are_sigma(d in 2usize..=3, seed: u64) {
        let (x, _, t, _) = session(d, seed);
        let xf = to_float(&x);
        let v = delta_apply(&GnsVector::new(xf.clone()), &DeltaPower::Imaginary(t));
        prop_assert!(v.element().equals(&sigma_t(&xf, t)).unwrap());
        let sym = delta_apply(&GnsVector::new(lift(&x)), &DeltaPower::Imaginary(t));
        prop_assert!(sym.element().equals(&sigma_t(&lift(&x), t)).unwrap());
    }
}
