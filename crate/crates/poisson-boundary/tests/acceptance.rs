//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use poisson_boundary::choi_effros::{cesaro_project, default_max_steps, product_iterative, MixedForm};
use poisson_boundary::classification::{
    classify_exact, classify_float, exponent_decomposition, rational_lambda_check, VerdictKind,
};
use poisson_boundary::cuntz::{CuntzElement, Monomial, Weights};
use poisson_boundary::fock::{
    build_vacuum_projection, build_word_operator, is_harmonic, markov_step, Kind, Side, TruncatedOperator,
};
use poisson_boundary::modular::{
    delta_apply, modular_conjugation, monomial_family, s_operator, sigma_t, DeltaPower, GnsVector, Symbolic,
};
use poisson_boundary::quantization::{
    automorphism_check, basis_independence_random, counterexample_report, homomorphism_on_generators,
    random_exact_unitary, random_float_unitary,
};
use poisson_boundary::random::{random_element, random_weights, random_word};
use poisson_boundary::scalar::{parse_coeff, rat, Exact, Float, Scalar};
use poisson_boundary::structure::{dr_convergence, faithfulness_probe, masa_commutant_probe, span_basis};
use poisson_boundary::verify::check_mixed;
use poisson_boundary::word::{WeightVector, Word};
use poisson_boundary::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Classification tolerance for the golden-ratio weights.
const GOLDEN_TOL: f64 = 1e-9;
/// Float basis-independence deviation bound.
const BASIS_TOL: f64 = 1e-10;
const MIXED_INSTANCES: usize = 210;
const MODULAR_PAIRS: usize = 100;
const UNITARIES: usize = 10;
const PAIRS_PER_UNITARY: usize = 50;
const ROUND_TRIPS: usize = 20;
const DR_N_MAX: usize = 6;
const DR_N0_BOUND: usize = 4;
const HARMONIC_CUT: usize = 6;
const TRUNCATION_CUT: usize = 8;
const BASIS_CUT: usize = 6;
const RUNTIME_BUDGET_SECS: f64 = 60.0;

type El = CuntzElement<Exact>;

fn exact(s: &str) -> Weights<BigRational> {
    Arc::new(WeightVector::parse(s).unwrap())
}

fn letter(i: u8) -> Word {
    Word::letter(i)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cuntz_relations() -> Result<(bool, String)> {
    let mut ok = true;
    let mut r = rng(1);
    for d in 2..=3usize {
        let w = Arc::new(random_weights(d, &mut r));
        let one = El::one(&w);
        let id = TruncatedOperator::<Exact>::identity(d, TRUNCATION_CUT);
        let mut sum = El::zero(&w);
        for i in 1..=d as u8 {
            sum = sum.add(&El::m(&w, &letter(i), &letter(i)))?;
            for j in 1..=d as u8 {
                let want = if i == j { one.clone() } else { El::zero(&w) };
                ok &= El::r_star(&w, &letter(i)).product(&El::r(&w, &letter(j)))?.equals(&want)?;
                let rs = build_word_operator::<Exact>(Side::Right, Kind::Annihilation, &letter(i), d, TRUNCATION_CUT)?;
                let rj = build_word_operator::<Exact>(Side::Right, Kind::Creation, &letter(j), d, TRUNCATION_CUT)?;
                let (got, _) = product_iterative(&rs, &rj, &w, default_max_steps(TRUNCATION_CUT, 2))?;
                let want = if i == j { id.recut(got.cut())? } else { TruncatedOperator::zero(d, got.cut()) };
                let block = got.exact_block().unwrap_or(0);
                ok &= block >= 1 && got.compare_on_block(&want, block).0;
            }
        }
        ok &= sum.sub(&one)?.is_zero()?;
        ok &= sum.to_truncated(TRUNCATION_CUT)?.compare_on_block(&id, TRUNCATION_CUT).0;
    }
    Ok((ok, format!("d = 2, 3; truncated at cut {TRUNCATION_CUT}")))
}

fn mixed_form(k: usize, i: Word, j: Word) -> MixedForm {
    match k % 7 {
        0 => MixedForm::I { i },
        1 => MixedForm::Ii { i },
        2 => MixedForm::Iii { i, j },
        3 => MixedForm::Iv { i },
        4 => MixedForm::V { i },
        5 => MixedForm::Vi { i, j },
        _ => MixedForm::Vii { i, j },
    }
}

fn mixed_products() -> Result<(bool, String)> {
    let mut r = rng(2);
    let mut agree = 0;
    let mut within = 0;
    let mut max_steps = 0;
    for k in 0..MIXED_INSTANCES {
        let d = 2 + k % 2;
        let w = Arc::new(random_weights(d, &mut r));
        let form = mixed_form(k / 2, random_word(d, 3, &mut r), random_word(d, 3, &mut r));
        let x: El = random_element(&w, 3, 2, &mut r);
        let limit = form.words().iter().map(|w| w.len()).max().unwrap_or(0) + 1;
        let (ok, steps, _) = check_mixed(&form, &x, &w)?;
        agree += ok as usize;
        within += (steps <= limit) as usize;
        max_steps = max_steps.max(steps);
    }
    let ok = agree == MIXED_INSTANCES && within == MIXED_INSTANCES;
    Ok((ok, format!("{agree}/{MIXED_INSTANCES} agree, {within} within length+1, max steps {max_steps}")))
}

fn faithfulness() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = String::new();
    for s in ["1/3,2/3", "1/2,1/2", "2/7,5/7"] {
        let w = exact(s);
        let rep = faithfulness_probe::<Exact>(&w, 2, 4)?;
        let dim = span_basis(2, 2).len();
        ok &= rep.gram_psd && rep.gram_rank == rep.operator_rank && rep.gram_rank == dim;
        detail = format!("{} vectors, rank {} (operator rank {})", rep.vectors, rep.gram_rank, rep.operator_rank);
    }
    Ok((ok, detail))
}

fn modular() -> Result<(bool, String)> {
    let w = exact("1/3,2/3");
    let lift = |x: &El| x.map_scalar(|c| Symbolic::from(c.clone()));
    let half = DeltaPower::Real(rat(1, 2));
    let mut ok = true;
    let family = monomial_family(2, 3);
    for m in &family {
        let v = GnsVector::new(lift(&El::monomial(&w, m.clone(), Exact::one())));
        ok &= modular_conjugation(&delta_apply(&v, &half)).equals(&s_operator(&v))?;
    }
    let mut r = rng(4);
    for _ in 0..MODULAR_PAIRS {
        let t: f64 = r.gen_range(-2.0..2.0);
        let x = lift(&random_element::<Exact, _>(&w, 3, 2, &mut r));
        let y = lift(&random_element::<Exact, _>(&w, 3, 2, &mut r));
        ok &= sigma_t(&x.product(&y)?, t).equals(&sigma_t(&x, t).product(&sigma_t(&y, t))?)?;
        ok &= sigma_t(&x.adjoint(), t).equals(&sigma_t(&x, t).adjoint())?;
        ok &= sigma_t(&x, t).vacuum_state() == x.vacuum_state();
    }
    let v = GnsVector::new(lift(&El::m(&w, &letter(1), &letter(2))));
    let got = delta_apply(&v, &DeltaPower::Real(rat(1, 1)));
    let c = got.element().coefficient(&Monomial::new(letter(1), letter(2)));
    let eig = c.as_exact();
    ok &= eig == Some(Exact::from_real(&rat(1, 2)));
    let eig = eig.map_or_else(|| "not exact".into(), |e| e.re.to_string());
    Ok((ok, format!("{} vectors, {MODULAR_PAIRS} pairs, eigenvalue of ξ(1,2) {eig}", family.len())))
}

fn classification() -> Result<(bool, String)> {
    let mut ok = true;
    let half = classify_exact(&WeightVector::parse("1/2,1/2")?)?;
    ok &= half.kind == VerdictKind::IIILambda && half.lambda.as_deref() == Some("1/2");
    ok &= classify_exact(&WeightVector::parse("1/3,2/3")?)?.kind == VerdictKind::IIIOne;

    let l = (5f64.sqrt() - 1.0) / 2.0;
    let golden = classify_float(&WeightVector::new(vec![l, l * l])?, GOLDEN_TOL)?;
    let lf = golden.lambda_f64.unwrap_or(f64::NAN);
    ok &= golden.kind == VerdictKind::IIILambda && (lf - 0.6180339887).abs() < GOLDEN_TOL;

    let mut r = rng(5);
    let mut trips = 0;
    while trips < ROUND_TRIPS {
        let k = r.gen_range(2..=4i64);
        let d = r.gen_range(2..=5usize);
        let lambda = rat(1, k);
        let Ok(options) = exponent_decomposition(&lambda, d, 5) else { continue };
        let ks = &options[r.gen_range(0..options.len())];
        let values: Vec<BigRational> = ks.iter().map(|&e| num_traits::pow(lambda.clone(), e as usize)).collect();
        let v = classify_exact(&WeightVector::new(values)?)?;
        ok &= v.lambda_exact.as_ref() == Some(&lambda) && v.exponents() == *ks;
        trips += 1;
    }
    // The gate that raises the consistency error rejects every p/q with p > 1.
    for (p, q) in [(2, 3), (3, 4), (2, 5), (5, 7)] {
        ok &= !rational_lambda_check(&rat(p, q)).admissible;
    }
    ok &= rational_lambda_check(&rat(1, 3)).admissible;
    Ok((ok, format!("golden λ = {lf:.12}, {ROUND_TRIPS} round trips")))
}

fn quantization() -> Result<(bool, String)> {
    let mut ok = true;
    let mut r = rng(6);
    for d in 2..=3usize {
        let w: Weights<BigRational> = Arc::new(WeightVector::uniform(d)?);
        for _ in 0..UNITARIES {
            let u = random_exact_unitary(d, &mut r);
            let v = random_exact_unitary(d, &mut r);
            ok &= automorphism_check(&u, &w, PAIRS_PER_UNITARY, 2, &mut r)?.passed;
            ok &= homomorphism_on_generators(&u, &v, &w)?;
        }
    }
    let w = exact("1/3,2/3");
    let rep = counterexample_report::<Exact>(&w, 1, 2, 4)?;
    let coeff: Exact = parse_coeff(&rep.witness_coefficient.re, &rep.witness_coefficient.im)?;
    let want = Exact::from_real(&rat(-1, 3));
    ok &= coeff == want && !coeff.is_zero();

    let mut dev: f64 = 0.0;
    for s in ["1/2,1/2", "1/3,2/3"] {
        let w = exact(s);
        let v = random_exact_unitary(2, &mut r);
        ok &= basis_independence_random::<Exact, _>(&w, &v, BASIS_CUT, 2, &mut r)?.passed;
        let wf: WeightVector<f64> = WeightVector::parse(s)?;
        let vf = random_float_unitary(2, &mut r);
        let rep = basis_independence_random::<Float, _>(&wf, &vf, BASIS_CUT, 10, &mut r)?;
        ok &= rep.passed && rep.max_deviation < BASIS_TOL;
        dev = dev.max(rep.max_deviation);
    }
    Ok((ok, format!("coefficient {}, basis deviation {dev:.1e} at cut {BASIS_CUT}", rep.witness_coefficient.re)))
}

fn masa() -> Result<(bool, String)> {
    let rep = masa_commutant_probe::<Exact>(&exact("1/3,2/3"), 2)?;
    Ok((
        rep.equals_diagonal_span,
        format!("commutant {} = diagonal {} in span {}", rep.commutant_dim, rep.diagonal_dim, rep.span_dim),
    ))
}

fn dr() -> Result<(bool, String)> {
    let w = exact("1/3,2/3");
    let mut ok = true;
    let mut seen = Vec::new();
    for i in Word::all_up_to(2, 2) {
        let rep = dr_convergence::<Exact>(&w, &i, DR_N_MAX)?;
        let n0 = rep.n0.unwrap_or(usize::MAX);
        ok &= rep.truncated_by.is_none() && rep.stays_zero && n0 <= DR_N0_BOUND && n0 == i.len().max(1);
        seen.push(format!("{}:{n0}", if i.is_empty() { "()".into() } else { i.to_digits() }));
    }
    Ok((ok, format!("n0 by word {}", seen.join(" "))))
}

fn harmonicity() -> Result<(bool, String)> {
    let mut ok = true;
    let mut r = rng(9);
    let mut defect = String::new();
    for d in 2..=3usize {
        let w = Arc::new(random_weights(d, &mut r));
        for i in Word::all_up_to(d, 2) {
            let ri = build_word_operator::<Exact>(Side::Right, Kind::Creation, &i, d, HARMONIC_CUT)?;
            ok &= is_harmonic(&ri, &w)?.is_harmonic();
            for j in Word::all_up_to(d, 2) {
                ok &= is_harmonic(&El::m(&w, &i, &j).to_truncated(HARMONIC_CUT)?, &w)?.is_harmonic();
            }
        }
        let l1 = build_word_operator::<Exact>(Side::Left, Kind::Creation, &letter(1), d, HARMONIC_CUT)?;
        let rep = is_harmonic(&l1, &w)?;
        let p = markov_step(&l1, &w)?;
        let want = Exact::one().sub(&Exact::from_real(w.get(1)));
        ok &= !rep.is_harmonic();
        for e in &rep.defects {
            ok &= l1.get(&e.row, &e.col).sub(&p.get(&e.row, &e.col)) == want;
        }
        defect = format!("l_1 defect 1 - ω_1 = {}", want.re);
    }
    Ok((ok, defect))
}

fn cesaro() -> Result<(bool, String)> {
    let mut ok = true;
    for d in 2..=3usize {
        let w = Arc::new(random_weights(d, &mut rng(10 + d as u64)));
        let p = build_vacuum_projection::<Exact>(d, TRUNCATION_CUT);
        let res = cesaro_project(&p, &w, TRUNCATION_CUT)?;
        ok &= res.stabilized && res.projection.is_zero();
        for i in Word::all_up_to(d, 2).into_iter().filter(|i| !i.is_empty()) {
            let ri = build_word_operator::<Exact>(Side::Right, Kind::Creation, &i, d, TRUNCATION_CUT)?;
            let res = cesaro_project(&ri, &w, TRUNCATION_CUT)?;
            let block = res.projection.exact_block().unwrap_or(0);
            ok &= res.stabilized && block >= 1 && ri.recut(res.projection.cut())?.compare_on_block(&res.projection, block).0;
        }
    }
    Ok((ok, format!("cut {TRUNCATION_CUT}")))
}

type Criterion = (&'static str, fn() -> Result<(bool, String)>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("cuntz relations", cuntz_relations),
        ("mixed products", mixed_products),
        ("faithfulness", faithfulness),
        ("modular theory", modular),
        ("classification", classification),
        ("quantization", quantization),
        ("masa", masa),
        ("dr convergence", dr),
        ("harmonicity", harmonicity),
        ("cesaro projection", cesaro),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !ok as usize;
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {detail} ({:.2}s)", n + 1, t.elapsed().as_secs_f64());
    }
    let total = start.elapsed().as_secs_f64();
    println!("total {total:.2}s (budget {RUNTIME_BUDGET_SECS}s)");
    if failed > 0 || total > RUNTIME_BUDGET_SECS {
        std::process::exit(1);
    }
}
