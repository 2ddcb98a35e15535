//! Batch verification suites. Each suite draws seeded random instances, checks identities
//! against an independent computation, and returns a deterministic report.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::choi_effros::{
    cesaro_project, closed_form_mixed, default_max_steps, mixed_iterative, product_iterative, MixedForm,
};
use crate::cuntz::{CuntzElement, Monomial, Weights};
use crate::error::{Error, Result};
use crate::fock::{build_vacuum_projection, build_word_operator, is_harmonic, markov_step, Kind, Side, TruncatedOperator};
use crate::modular::{
    delta_apply, is_centralizer, modular_conjugation, monomial_family, s_operator, sigma_t, DeltaPower, GnsVector,
    ModularScalar, Symbolic,
};
use crate::quantization::{
    automorphism_check, basis_independence_random, conjugate, counterexample_report, homomorphism_on_generators, preserves_vacuum_state,
    second_quantize, symbolic_gamma, RandomUnitary,
};
use crate::random::{random_element, random_truncated, random_word};
use crate::scalar::{parse_coeff, Exact, Float, Mode, Real, Scalar};
use crate::structure::{
    alpha_endo, center_probe, diagonal_in_centralizer, diagonal_part, dr_convergence, faithfulness_probe, flip_unitary,
    is_diagonal, masa_commutant_probe, minimal_projection_probe, span_basis,
};
use crate::word::{WeightVector, Word};

pub const SCHEMA: u32 = 1;

/// Failure descriptions kept per check.
const MAX_NOTES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Multiplications,
    Phi,
    Delta,
    Masa,
    Dr,
    Quantize,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Multiplications,
        Suite::Phi,
        Suite::Delta,
        Suite::Masa,
        Suite::Dr,
        Suite::Quantize,
    ];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "multiplications" => Suite::Multiplications,
            "phi" => Suite::Phi,
            "delta" => Suite::Delta,
            "masa" => Suite::Masa,
            "dr" => Suite::Dr,
            "quantize" => Suite::Quantize,
            "all" => Suite::All,
            _ => return Err(Error::Domain(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Multiplications => "multiplications",
            Suite::Phi => "phi",
            Suite::Delta => "delta",
            Suite::Masa => "masa",
            Suite::Dr => "dr",
            Suite::Quantize => "quantize",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    /// Word-length bound for enumerated families and random instances.
    pub max_len: usize,
    /// Truncation for operator-level checks.
    pub cut: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { trials: 50, seed: 0, max_len: 2, cut: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub weights: Vec<String>,
    pub mode: Mode,
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

struct Tally {
    name: String,
    instances: usize,
    failures: usize,
    notes: Vec<String>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally { name: name.into(), instances: 0, failures: 0, notes: Vec::new() }
    }

    fn record(&mut self, outcome: Result<bool>, what: impl FnOnce() -> String) {
        self.instances += 1;
        let msg = match outcome {
            Ok(true) => return,
            Ok(false) => what(),
            Err(e) => format!("{}: {e}", what()),
        };
        self.failures += 1;
        if self.notes.len() < MAX_NOTES {
            self.notes.push(msg);
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn done(self) -> CheckResult {
        CheckResult { name: self.name, instances: self.instances, failures: self.failures, notes: self.notes }
    }
}

/// Scalars the suites run over, paired with their modular counterpart.
pub trait VerifyScalar: RandomUnitary {
    type Modular: ModularScalar<Real = Self::Real>;
    fn to_modular(&self) -> Self::Modular;
}

impl VerifyScalar for Exact {
    type Modular = Symbolic;
    fn to_modular(&self) -> Symbolic {
        Symbolic::from(self.clone())
    }
}

impl VerifyScalar for Float {
    type Modular = Float;
    fn to_modular(&self) -> Float {
        *self
    }
}

pub fn verify_exact(w: &WeightVector<BigRational>, suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    verify::<Exact>(Arc::new(w.clone()), suite, cfg)
}

pub fn verify_float(w: &WeightVector<f64>, suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    verify::<Float>(Arc::new(w.clone()), suite, cfg)
}

pub fn verify<S: VerifyScalar>(w: Weights<S::Real>, suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut suites = Vec::new();
    for s in list {
        // Each suite has its own stream so that running one alone reproduces `all`.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let checks = match s {
            Suite::Multiplications => multiplications::<S>(&w, cfg, &mut rng)?,
            Suite::Phi => phi::<S>(&w, cfg, &mut rng)?,
            Suite::Delta => delta::<S>(&w, cfg, &mut rng)?,
            Suite::Masa => masa::<S>(&w, cfg, &mut rng)?,
            Suite::Dr => dr::<S>(&w, cfg, &mut rng)?,
            Suite::Quantize => quantize::<S>(&w, cfg, &mut rng)?,
            Suite::All => unreachable!("expanded above"),
        };
        let passed = checks.iter().all(CheckResult::passed);
        suites.push(SuiteReport { suite: s, checks, passed });
    }
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport {
        schema: SCHEMA,
        weights: w.to_repr(),
        mode: S::MODE,
        seed: cfg.seed,
        trials: cfg.trials,
        suites,
        passed,
    })
}

fn letter(i: u8) -> Word {
    Word::from_letters(&[i])
}

fn random_form<G: Rng + ?Sized>(d: usize, rng: &mut G) -> MixedForm {
    let i = random_word(d, 3, rng);
    let j = random_word(d, 3, rng);
    match rng.gen_range(0..7) {
        0 => MixedForm::I { i },
        1 => MixedForm::Ii { i },
        2 => MixedForm::Iii { i, j },
        3 => MixedForm::Iv { i },
        4 => MixedForm::V { i },
        5 => MixedForm::Vi { i, j },
        _ => MixedForm::Vii { i, j },
    }
}

/// Cut used for one mixed-product instance: room for the longest word, `x`, and the iteration.
pub fn mixed_cut(form: &MixedForm, x: &CuntzElement<impl Scalar>) -> usize {
    let words = form.words().iter().map(|w| w.len()).max().unwrap_or(0);
    (words + x.max_word_len() + 3).max(6)
}

/// Compares a closed-form mixed product with the iterative one; returns the agreement and the
/// number of Markov steps the iteration needed.
pub fn check_mixed<S: Scalar>(
    form: &MixedForm,
    x: &CuntzElement<S>,
    w: &WeightVector<S::Real>,
) -> Result<(bool, usize, usize)> {
    let cut = mixed_cut(form, x);
    let xt = x.to_truncated(cut)?;
    let closed = closed_form_mixed(form, &xt, w)?;
    let degree: usize = form.words().iter().map(|w| w.len()).sum::<usize>() + x.max_word_len();
    let (it, steps) = mixed_iterative(form, &xt, w, default_max_steps(cut, degree).max(3))?;
    let block = closed.exact_block().unwrap_or(0).min(it.exact_block().unwrap_or(0));
    let (ok, _) = closed.recut(it.cut())?.compare_on_block(&it, block);
    Ok((ok && block >= 1, steps, block))
}

fn multiplications<S: VerifyScalar>(w: &Weights<S::Real>, cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let d = w.d();
    let mut mixed = Tally::new("mixed_closed_forms");
    let mut bound = Tally::new("stabilization_within_length_plus_one");
    let mut max_steps_seen = 0;
    for _ in 0..cfg.trials {
        let form = random_form(d, rng);
        let x = random_element::<S, _>(w, 3, 2, rng);
        let limit = form.words().iter().map(|w| w.len()).max().unwrap_or(0) + 1;
        match check_mixed(&form, &x, w) {
            Ok((ok, steps, block)) => {
                max_steps_seen = max_steps_seen.max(steps);
                mixed.record(Ok(ok), || format!("{form:?} on x = {x}: mismatch on block {block}"));
                bound.record(Ok(steps <= limit), || format!("{form:?}: {steps} steps > {limit}"));
            }
            Err(e) => mixed.record(Err(e), || format!("{form:?}")),
        }
    }
    bound.note(format!("max steps observed: {max_steps_seen}"));

    let mut sym = Tally::new("symbolic_vs_iterative_product");
    for _ in 0..(cfg.trials / 4).max(1) {
        let x = random_element::<S, _>(w, 2, 2, rng);
        let y = random_element::<S, _>(w, 2, 2, rng);
        let cut = x.max_word_len() + y.max_word_len() + 5;
        let outcome = (|| -> Result<bool> {
            let want = x.product(&y)?.to_truncated(cut)?;
            let (got, _) = product_iterative(&x.to_truncated(cut)?, &y.to_truncated(cut)?, w, cut)?;
            let block = got.exact_block().unwrap_or(0);
            Ok(block >= 1 && want.recut(got.cut())?.compare_on_block(&got, block).0)
        })();
        sym.record(outcome, || format!("x = {x}, y = {y}"));
    }

    let mut rel = Tally::new("cuntz_relations");
    let one = CuntzElement::<S>::one(w);
    let cut = cfg.cut;
    let id = TruncatedOperator::<S>::identity(d, cut);
    let mut sum = CuntzElement::<S>::zero(w);
    for i in 1..=d as u8 {
        sum = sum.add(&CuntzElement::m(w, &letter(i), &letter(i)))?;
        for j in 1..=d as u8 {
            let prod = CuntzElement::<S>::r_star(w, &letter(i)).product(&CuntzElement::r(w, &letter(j)));
            let want = if i == j { one.clone() } else { CuntzElement::zero(w) };
            rel.record(prod.and_then(|p| p.equals(&want)), || format!("r_{i}* ∘ r_{j}"));
            let outcome = (|| -> Result<bool> {
                let rs = build_word_operator::<S>(Side::Right, Kind::Annihilation, &letter(i), d, cut)?;
                let r = build_word_operator::<S>(Side::Right, Kind::Creation, &letter(j), d, cut)?;
                let (got, _) = product_iterative(&rs, &r, w, default_max_steps(cut, 2))?;
                let want = if i == j { id.recut(got.cut())? } else { TruncatedOperator::zero(d, got.cut()) };
                Ok(got.compare_on_block(&want, got.exact_block().unwrap_or(0)).0)
            })();
            rel.record(outcome, || format!("truncated r_{i}* ∘ r_{j} at cut {cut}"));
        }
    }
    rel.record(sum.equals(&one), || "Σ M(i,i) = 1".into());
    rel.record(
        sum.to_truncated(cut).map(|t| t.compare_on_block(&id, cut).0),
        || "Σ M(i,i) = 1 on truncated operators".into(),
    );

    let mut harm = Tally::new("harmonicity");
    let hcut = 6.min(cut);
    for i in Word::all_up_to(d, cfg.max_len.min(2)) {
        let r = build_word_operator::<S>(Side::Right, Kind::Creation, &i, d, hcut)?;
        harm.record(is_harmonic(&r, w).map(|h| h.is_harmonic()), || format!("r_{i}"));
        for j in Word::all_up_to(d, cfg.max_len.min(2)) {
            let m = CuntzElement::<S>::m(w, &i, &j).to_truncated(hcut)?;
            harm.record(is_harmonic(&m, w).map(|h| h.is_harmonic()), || format!("M({i},{j})"));
        }
    }
    let l1 = build_word_operator::<S>(Side::Left, Kind::Creation, &letter(1), d, hcut)?;
    let rep = is_harmonic(&l1, w)?;
    let expected = S::one().sub(&S::from_real(w.get(1)));
    let defect_ok = (|| -> Result<bool> {
        let p = markov_step(&l1, w)?;
        let e = &rep.defects.first().ok_or_else(|| Error::Inconsistency("l_1 reported harmonic".into()))?;
        Ok(!rep.is_harmonic() && l1.get(&e.row, &e.col).sub(&p.get(&e.row, &e.col)).approx_eq(&expected))
    })();
    harm.record(defect_ok, || "l_1 defect equals 1 − ω_1".into());

    let mut ces = Tally::new("cesaro_projection");
    let ccut = cut.max(8);
    let p = build_vacuum_projection::<S>(d, ccut);
    let res = cesaro_project(&p, w, ccut)?;
    ces.record(Ok(res.stabilized && res.projection.is_zero()), || format!("p_Ω ↦ {:?}", res.method));
    for i in Word::all_up_to(d, 2).into_iter().filter(|i| !i.is_empty()) {
        let r = build_word_operator::<S>(Side::Right, Kind::Creation, &i, d, ccut)?;
        let outcome = cesaro_project(&r, w, ccut).and_then(|res| {
            let block = res.projection.exact_block().unwrap_or(0);
            Ok(res.stabilized && block >= 1 && r.recut(res.projection.cut())?.compare_on_block(&res.projection, block).0)
        });
        ces.record(outcome, || format!("r_{i} not fixed"));
    }

    Ok(vec![mixed.done(), bound.done(), sym.done(), rel.done(), harm.done(), ces.done()])
}

/// `x + (M(I,J) − Σ_K M(IK,JK))`: the same element with a redundant expansion mixed in.
fn padded<S: VerifyScalar>(x: &CuntzElement<S>, rng: &mut ChaCha8Rng) -> Result<CuntzElement<S>> {
    let w = x.weights();
    let d = w.d();
    let m = crate::random::random_monomial(d, 2, rng);
    let c = S::random_small(rng);
    let depth = rng.gen_range(1..=3);
    let mut terms = vec![(m.clone(), c.clone())];
    for k in Word::all_of_length(d, depth) {
        terms.push((Monomial::new(m.i.concat(&k), m.j.concat(&k)), c.neg()));
    }
    x.add(&CuntzElement::from_terms(w, terms)?)
}

fn phi<S: VerifyScalar>(w: &Weights<S::Real>, cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let d = w.d();
    let mut rules = Tally::new("phi_on_monomials_vs_vacuum_entry");
    for m in monomial_family(d, cfg.max_len) {
        let x = CuntzElement::<S>::monomial(w, m.clone(), S::one());
        let want = if m.is_diagonal() { S::from_real(&w.word_weight(&m.j)) } else { S::zero() };
        let outcome = x
            .to_truncated(m.max_len())
            .map(|t| x.vacuum_state().approx_eq(&want) && t.get(&Word::empty(), &Word::empty()).approx_eq(&want));
        rules.record(outcome, || format!("φ({m})"));
    }
    let mut pos = Tally::new("positivity_and_adjoint");
    let mut inner = Tally::new("gns_fast_vs_direct");
    let mut nf = Tally::new("normal_form_idempotent");
    for _ in 0..cfg.trials {
        let x = random_element::<S, _>(w, 4, cfg.max_len, rng);
        let y = padded(&random_element::<S, _>(w, 4, cfg.max_len, rng), rng)?;
        let outcome = (|| -> Result<bool> {
            let n = x.gns_norm_sq()?.to_c64();
            let adj = x.adjoint().vacuum_state().approx_eq(&x.vacuum_state().conj());
            Ok(n.re >= -1e-12 && n.im.abs() <= 1e-12 && adj)
        })();
        pos.record(outcome, || format!("x = {x}"));
        let outcome = (|| -> Result<bool> {
            Ok(x.gns_inner(&y)?.approx_eq(&x.gns_inner_direct(&y)?)
                && y.gns_inner(&y)?.approx_eq(&y.gns_inner_direct(&y)?))
        })();
        inner.record(outcome, || format!("x = {x}, y = {y}"));
        let outcome = (|| -> Result<bool> {
            let a = y.normal_form()?;
            Ok(a.normal_form()? == a && a.equals(&y)?)
        })();
        nf.record(outcome, || format!("y = {y}"));
    }
    Ok(vec![rules.done(), pos.done(), inner.done(), nf.done()])
}

fn delta<S: VerifyScalar>(w: &Weights<S::Real>, cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let d = w.d();
    let half = BigRational::new(1.into(), 2.into());
    let lift = |x: &CuntzElement<S>| x.map_scalar(S::to_modular);
    let mut sj = Tally::new("s_equals_j_delta_half");
    let mut jj = Tally::new("j_involution");
    for m in monomial_family(d, cfg.max_len.clamp(1, 3)) {
        let v = GnsVector::new(lift(&CuntzElement::monomial(w, m.clone(), S::one())));
        let lhs = modular_conjugation(&delta_apply(&v, &DeltaPower::Real(half.clone())));
        sj.record(lhs.equals(&s_operator(&v)), || format!("ξ{m}"));
        jj.record(modular_conjugation(&modular_conjugation(&v)).equals(&v), || format!("ξ{m}"));
    }
    let mut auto = Tally::new("sigma_t_star_automorphism");
    let mut inv = Tally::new("phi_sigma_t_invariance");
    let mut kms = Tally::new("kms_condition");
    for _ in 0..cfg.trials {
        let t: f64 = rng.gen_range(-2.0..2.0);
        let x = random_element::<S, _>(w, 3, cfg.max_len, rng);
        let y = random_element::<S, _>(w, 3, cfg.max_len, rng);
        let (xm, ym) = (lift(&x), lift(&y));
        let outcome = (|| -> Result<bool> {
            let prod = sigma_t(&xm.product(&ym)?, t).equals(&sigma_t(&xm, t).product(&sigma_t(&ym, t))?)?;
            let star = sigma_t(&xm.adjoint(), t).equals(&sigma_t(&xm, t).adjoint())?;
            Ok(prod && star)
        })();
        auto.record(outcome, || format!("t = {t}, x = {x}, y = {y}"));
        inv.record(Ok(sigma_t(&xm, t).vacuum_state().approx_eq(&xm.vacuum_state())), || format!("t = {t}, x = {x}"));
        // φ(x ∘ σ_{−i}(y)) = φ(y ∘ x) with σ_{−i} = Δ on monomials.
        let outcome = (|| -> Result<bool> {
            let sy = delta_apply(&GnsVector::new(y.clone().map_scalar(S::to_modular)), &DeltaPower::Real(BigRational::new(1.into(), 1.into())));
            let lhs = xm.product(sy.element())?.vacuum_state();
            let rhs = ym.product(&xm)?.vacuum_state();
            Ok(lhs.approx_eq(&rhs))
        })();
        kms.record(outcome, || format!("x = {x}, y = {y}"));
    }
    let mut eig = Tally::new("delta_eigenvalue");
    let v = GnsVector::new(lift(&CuntzElement::m(w, &letter(1), &letter(2))));
    let got = delta_apply(&v, &DeltaPower::Real(BigRational::new(1.into(), 1.into())));
    let c = got.element().coefficient(&Monomial::new(letter(1), letter(2)));
    let want = S::Modular::from_real(&w.get(1).div(w.get(2)));
    eig.record(Ok(c.approx_eq(&want)), || format!("Δ ξ(1,2) coefficient {:?}", c.to_c64()));
    eig.note(format!("eigenvalue of ξ(1,2): {}", w.get(1).div(w.get(2)).to_repr()));
    let mut cent = Tally::new("centralizer");
    for i in Word::all_up_to(d, 2) {
        for j in Word::all_up_to(d, 2) {
            let x = CuntzElement::<S>::m(w, &i, &j);
            let want = w.word_weight(&i).approx_eq(&w.word_weight(&j));
            cent.record(is_centralizer(&x).map(|b| b == want), || format!("M({i},{j})"));
        }
    }
    Ok(vec![sj.done(), jj.done(), auto.done(), inv.done(), kms.done(), eig.done(), cent.done()])
}

fn masa<S: VerifyScalar>(w: &Weights<S::Real>, cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let d = w.d();
    let l = cfg.max_len.clamp(1, 2);
    let mut probe = Tally::new("masa_commutant_equals_diagonal_span");
    let rep = masa_commutant_probe::<S>(w, l)?;
    probe.record(Ok(rep.equals_diagonal_span), || format!("{rep:?}"));
    probe.note(format!(
        "span {} / commutant {} / diagonal {}",
        rep.span_dim, rep.commutant_dim, rep.diagonal_dim
    ));
    let one = CuntzElement::<S>::one(w);
    let m11 = CuntzElement::<S>::m(w, &letter(1), &letter(1));
    let m12 = CuntzElement::<S>::m(w, &letter(1), &letter(2));
    probe.record(
        m12.product(&m11).and_then(|a| Ok(!a.equals(&m11.product(&m12)?)?)),
        || "M(1,2) commutes with M(1,1)".into(),
    );

    let mut diag = Tally::new("diagonal");
    diag.record(
        diagonal_part(&m11.add(&m12)?).and_then(|p| p.equals(&m11)),
        || "diagonal_part(M(1,1) + M(1,2))".into(),
    );
    let mut sum = CuntzElement::<S>::zero(w);
    for i in 1..=d as u8 {
        sum = sum.add(&CuntzElement::m(w, &letter(i), &letter(i)))?;
    }
    diag.record(is_diagonal(&sum), || "Σ M(i,i)".into());
    diag.record(is_diagonal(&m12).map(|b| !b), || "M(1,2) reported diagonal".into());
    diag.record(diagonal_in_centralizer::<S>(w, l), || "diagonal monomial outside centralizer".into());

    let mut center = Tally::new("center_probe");
    let rep = center_probe(&one, l, cfg.trials.min(20), rng)?;
    center.record(Ok(rep.all_pass() && rep.witness_isometry && rep.witness_not_unitary), || format!("{rep:?}"));
    let rep = center_probe(&m11, 1, 0, rng)?;
    center.record(Ok(!rep.failures.is_empty()), || "M(1,1) passed every central condition".into());

    let mut mp = Tally::new("minimal_projection_probe");
    let rep = minimal_projection_probe(&one, l)?;
    mp.record(Ok(rep.split_length == Some(1)), || format!("{rep:?}"));
    let rep = minimal_projection_probe(&m11, l.max(2))?;
    mp.record(Ok(rep.split_length.is_some()), || format!("{rep:?}"));

    let mut faith = Tally::new("faithfulness_gram_rank");
    let rep = faithfulness_probe::<S>(w, l, l + 2)?;
    let expect = span_basis(d, l).len();
    faith.record(
        Ok(rep.gram_psd && rep.gram_rank == rep.operator_rank && rep.gram_rank == expect),
        || format!("{rep:?}"),
    );
    faith.note(format!("{} vectors, rank {}", rep.vectors, rep.gram_rank));
    Ok(vec![probe.done(), diag.done(), center.done(), mp.done(), faith.done()])
}

fn dr<S: VerifyScalar>(w: &Weights<S::Real>, cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let d = w.d();
    let n_max = if d == 2 { 6 } else { 4 };
    let mut conv = Tally::new("dr_convergence");
    for i in Word::all_up_to(d, 2).into_iter().filter(|i| !i.is_empty()) {
        let rep = dr_convergence::<S>(w, &i, n_max)?;
        let ok = rep.truncated_by.is_none() && rep.stays_zero && rep.n0.is_some_and(|n| n <= i.len() + 1);
        conv.record(Ok(ok), || format!("I = {i}: n0 = {:?}, stays = {}", rep.n0, rep.stays_zero));
        conv.note(format!("I = {i}: n0 = {:?}", rep.n0));
    }
    let mut unit = Tally::new("flip_unitaries");
    let one = CuntzElement::<S>::one(w);
    for k in 1..=3 {
        let u = flip_unitary::<S>(w, k)?;
        unit.record(u.adjoint().product(&u).and_then(|p| p.equals(&one)), || format!("u_{k}* u_{k}"));
        unit.record(u.product(&u.adjoint()).and_then(|p| p.equals(&one)), || format!("u_{k} u_{k}*"));
    }
    let mut alpha = Tally::new("alpha_endomorphism");
    for _ in 0..cfg.trials {
        let x = random_element::<S, _>(w, 3, cfg.max_len, rng);
        let y = random_element::<S, _>(w, 3, cfg.max_len, rng);
        let outcome = (|| -> Result<bool> {
            let prod = alpha_endo(&x.product(&y)?)?.equals(&alpha_endo(&x)?.product(&alpha_endo(&y)?)?)?;
            let star = alpha_endo(&x.adjoint())?.equals(&alpha_endo(&x)?.adjoint())?;
            Ok(prod && star)
        })();
        alpha.record(outcome, || format!("x = {x}, y = {y}"));
    }
    alpha.record(alpha_endo(&one).and_then(|a| a.equals(&one)), || "α(1) = 1".into());
    Ok(vec![conv.done(), unit.done(), alpha.done()])
}

fn quantize<S: VerifyScalar>(w: &Weights<S::Real>, cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let d = w.d();
    let mut out = Vec::new();
    let unitaries = 10;
    let pairs = (cfg.trials / unitaries).max(1);
    if w.is_uniform() {
        let mut auto = Tally::new("symbolic_gamma_automorphism");
        let mut cross = Tally::new("symbolic_gamma_vs_conjugation");
        let mut hom = Tally::new("homomorphism_on_generators");
        let mut inj = Tally::new("injectivity_on_generators");
        for _ in 0..unitaries {
            let u = S::random_unitary(d, rng);
            let v = S::random_unitary(d, rng);
            let rep = automorphism_check(&u, w, pairs, cfg.max_len, rng)?;
            auto.instances += rep.pairs;
            if !rep.passed {
                auto.failures += rep.product_failures + rep.adjoint_failures + rep.zero_failures + rep.inverse_failures;
                if auto.notes.len() < MAX_NOTES {
                    auto.note(format!("{rep:?}"));
                }
            }
            // Dense Fock blocks: one cross check per unitary.
            let x = random_element::<S, _>(w, 2, cfg.max_len, rng);
            let cut = x.max_word_len() + 1;
            let outcome = (|| -> Result<bool> {
                let a = conjugate(&u, &x.to_truncated(cut)?)?;
                let b = symbolic_gamma(&u, &x)?.to_truncated(cut)?;
                Ok(a.compare_on_block(&b, cut).0)
            })();
            cross.record(outcome, || format!("x = {x}"));
            hom.record(homomorphism_on_generators(&u, &v, w), || "Ψ_U Ψ_V ≠ Ψ_UV".into());
            let outcome = (|| -> Result<bool> {
                let mut same = true;
                for i in 1..=d as u8 {
                    let r = CuntzElement::<S>::r(w, &letter(i));
                    same &= symbolic_gamma(&u, &r)?.equals(&symbolic_gamma(&v, &r)?)?;
                }
                Ok(u == v || !same)
            })();
            inj.record(outcome, || "distinct unitaries agree on generators".into());
        }
        let mut refuse = Tally::new("counterexample_refused_for_uniform");
        refuse.record(Ok(counterexample_report::<S>(w, 1, 2, 4).is_err()), || "uniform weights accepted".into());
        out.extend([auto.done(), cross.done(), hom.done(), inj.done(), refuse.done()]);
    } else {
        let mut ce = Tally::new("counterexample");
        let (i0, j0) = (1..=d as u8)
            .flat_map(|a| (1..=d as u8).map(move |b| (a, b)))
            .find(|&(a, b)| a < b && !w.get(a).approx_eq(w.get(b)))
            .ok_or_else(|| Error::Inconsistency("non-uniform weights without a distinct pair".into()))?;
        let rep = counterexample_report::<S>(w, i0, j0, 4)?;
        let want = S::from_real(&w.get(i0).sub(w.get(j0)));
        let got: S = parse_coeff(&rep.witness_coefficient.re, &rep.witness_coefficient.im)?;
        ce.record(
            Ok(got.approx_eq(&want) && !got.is_zero() && rep.witness_is_multiple_of_vacuum_projection && !rep.image_is_harmonic),
            || format!("{rep:?}"),
        );
        ce.note(format!(
            "i0 = {i0}, j0 = {j0}: witness coefficient {}; literal difference zero: {}",
            rep.witness_coefficient.re, rep.literal_difference_is_zero
        ));
        let mut refuse = Tally::new("symbolic_gamma_refused");
        let u = S::random_unitary(d, rng);
        refuse.record(
            Ok(matches!(symbolic_gamma(&u, &CuntzElement::one(w)), Err(Error::NonUniformWeights(_)))),
            || "non-uniform weights accepted".into(),
        );
        out.extend([ce.done(), refuse.done()]);
    }
    let mut basis = Tally::new("basis_independence");
    // Full blocks have d^cut rows; d = 2 affords cut 6.
    let bcut = cfg.cut.min(match (d, S::MODE) {
        (2, _) => 6,
        (_, Mode::Float) => 4,
        _ => 3,
    });
    // Exact arithmetic on full Fock blocks at cut 6 is costly; fewer instances there.
    let (rounds, samples) = match S::MODE {
        Mode::Exact => (1, 3),
        Mode::Float => (3, 20),
    };
    for _ in 0..rounds {
        let v = S::random_unitary(d, rng);
        let rep = basis_independence_random::<S, _>(w, &v, bcut, samples, rng)?;
        let ok = rep.passed && (S::MODE == Mode::Exact || rep.max_deviation < 1e-10);
        basis.record(Ok(ok), || format!("{rep:?}"));
    }
    let mut hom_t = Tally::new("gamma_homomorphism_truncated");
    let mut vac = Tally::new("gamma_preserves_vacuum_state");
    let tcut = cfg.cut.min(if d == 2 { 4 } else { 3 });
    for _ in 0..unitaries {
        let u = S::random_unitary(d, rng);
        let v = S::random_unitary(d, rng);
        let x: TruncatedOperator<S> = random_truncated(d, tcut, 10, rng);
        let outcome = (|| -> Result<bool> {
            let a = second_quantize(&u, tcut).compose(&second_quantize(&v, tcut))?;
            let b = second_quantize(&u.compose(&v), tcut);
            Ok(a.compare_on_block(&b, tcut).0)
        })();
        hom_t.record(outcome, || "Γ_U Γ_V ≠ Γ_UV".into());
        vac.record(preserves_vacuum_state(&u, &x), || "φ changed".into());
    }
    out.extend([basis.done(), hom_t.done(), vac.done()]);
    Ok(out)
}

/// Maps the weight parse of a CLI string to the matching report, for either mode.
pub fn verify_from_str(weights: &str, mode: Mode, suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    match mode {
        Mode::Exact => verify_exact(&WeightVector::parse(weights)?, suite, cfg),
        Mode::Float => verify_float(&WeightVector::parse(weights)?, suite, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        for s in Suite::EACH {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
