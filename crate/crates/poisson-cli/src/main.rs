use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use poisson_boundary::choi_effros::{default_max_steps, product_iterative};
use poisson_boundary::classification::{classify_exact, classify_float, DEFAULT_TOL};
use poisson_boundary::cuntz::{CuntzElement, ElementJson, Weights};
use poisson_boundary::modular::spectrum_sample;
use poisson_boundary::quantization::{
    automorphism_check, basis_independence_random, counterexample_report, UnitaryJson, UnitaryMatrix,
};
use poisson_boundary::scalar::{Exact, Float, Real};
use poisson_boundary::structure::{center_probe, dr_convergence, masa_commutant_probe, minimal_projection_probe};
use poisson_boundary::verify::{verify, Suite, VerifyConfig, VerifyScalar};
use poisson_boundary::word::{WeightVector, Word};
use poisson_boundary::Error;

#[derive(Parser)]
#[command(name = "poisson", version, about = "Computations in the Poisson boundary of the full Fock space")]
struct Cli {
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Seed for randomized instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exact rational arithmetic or floating point.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Type III_λ classification of the boundary for a weight vector.
    Classify {
        #[arg(long)]
        weights: String,
        /// Tolerance for float-mode commensurability.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Integer minimal polynomial of λ (constant term first), float mode only.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        min_poly: Option<Vec<i64>>,
    },
    /// Sorted ratios ω_I/ω_J for words up to the given length.
    Spectrum {
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Product of two elements read from JSON files.
    Product {
        #[arg(long)]
        weights: String,
        #[arg(long, value_name = "FILE")]
        left: PathBuf,
        #[arg(long, value_name = "FILE")]
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Symbolic)]
        method: Method,
        /// Truncation for the iterative method; defaults to the word lengths plus 3.
        #[arg(long)]
        cut: Option<usize>,
        /// Markov-step budget for the iterative method.
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Runs an identity suite on seeded random instances.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[arg(long, default_value_t = 8)]
        cut: usize,
    },
    /// Second quantization checks for a one-particle unitary.
    Quantize {
        #[arg(long)]
        weights: String,
        /// Unitary as JSON `{d, entries: [[{re, im}]]}`; random when omitted.
        #[arg(long, value_name = "FILE")]
        unitary: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Check::Auto)]
        check: Check,
        #[arg(long, default_value_t = 6)]
        cut: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Structure probes on finite spans.
    Probe {
        #[arg(value_enum)]
        kind: ProbeKind,
        #[arg(long)]
        weights: String,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        /// Element to probe (center, diffuse); JSON file.
        #[arg(long, value_name = "FILE")]
        element: Option<PathBuf>,
        /// Last n for the dr probe.
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Symbolic,
    Iterative,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Multiplications,
    Phi,
    Delta,
    Masa,
    Dr,
    Quantize,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Multiplications => Suite::Multiplications,
            SuiteArg::Phi => Suite::Phi,
            SuiteArg::Delta => Suite::Delta,
            SuiteArg::Masa => Suite::Masa,
            SuiteArg::Dr => Suite::Dr,
            SuiteArg::Quantize => Suite::Quantize,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Auto,
    Counterexample,
    Basis,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeKind {
    Masa,
    Center,
    Dr,
    Diffuse,
}

/// A report and whether every identity in it held.
struct Outcome {
    report: Value,
    passed: bool,
}

enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// Computation error: exit code 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidWeights(_)
            | Error::Domain(_)
            | Error::Contract(_)
            | Error::MixedWeights
            | Error::NonUniformWeights(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!(
            "parse error at {}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn read_element<S: VerifyScalar>(path: &Path, w: &Weights<S::Real>) -> Result<CuntzElement<S>, Failure> {
    let j: ElementJson = read_json(path)?;
    CuntzElement::from_json(&j, w).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn weights<R: Real>(s: &str) -> Result<Weights<R>, Failure> {
    Ok(Arc::new(WeightVector::parse(s)?))
}

/// Runs a mode-generic command with weights parsed in the requested mode.
macro_rules! dispatch {
    ($mode:expr, $weights:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            ModeArg::Exact => $f::<Exact>(weights::<BigRational>($weights)?, $($arg),*),
            ModeArg::Float => $f::<Float>(weights::<f64>($weights)?, $($arg),*),
        }
    };
}

fn classify(cli: &Cli, w: &str, tol: f64, min_poly: &Option<Vec<i64>>) -> CmdResult {
    let verdict = match cli.mode {
        ModeArg::Exact => {
            if min_poly.is_some() {
                return Err(Failure::Usage("--min-poly applies to --mode float".into()));
            }
            classify_exact(&WeightVector::parse(w)?)?
        }
        ModeArg::Float => {
            let mut wv = WeightVector::<f64>::parse(w)?;
            if let Some(p) = min_poly {
                wv = wv.with_min_poly(p.clone());
            }
            classify_float(&wv, tol)?
        }
    };
    Ok(Outcome { report: to_value(&verdict), passed: true })
}

fn spectrum(cli: &Cli, w: &str, max_len: usize) -> CmdResult {
    let report = match cli.mode {
        ModeArg::Exact => {
            let v = spectrum_sample(&WeightVector::<BigRational>::parse(w)?, max_len)?;
            Value::from(v.iter().map(Real::to_repr).collect::<Vec<_>>())
        }
        ModeArg::Float => Value::from(spectrum_sample(&WeightVector::<f64>::parse(w)?, max_len)?),
    };
    Ok(Outcome { report, passed: true })
}

fn product<S: VerifyScalar>(
    w: Weights<S::Real>,
    left: &Path,
    right: &Path,
    method: Method,
    cut: Option<usize>,
    max_steps: Option<usize>,
) -> CmdResult {
    let x = read_element::<S>(left, &w)?;
    let y = read_element::<S>(right, &w)?;
    let symbolic = x.product(&y)?.normal_form()?;
    match method {
        Method::Symbolic => Ok(Outcome { report: to_value(&symbolic.to_json()), passed: true }),
        Method::Iterative => {
            let degree = x.max_word_len() + y.max_word_len();
            let cut = cut.unwrap_or(degree + 3);
            let steps = max_steps.unwrap_or_else(|| default_max_steps(cut, degree));
            let (op, used) = product_iterative(&x.to_truncated(cut)?, &y.to_truncated(cut)?, &w, steps)?;
            let block = op.exact_block().unwrap_or(0);
            let (agree, diff) = symbolic.to_truncated(cut)?.recut(op.cut())?.compare_on_block(&op, block);
            let report = json!({
                "steps_used": used,
                "exact_block": block,
                "agrees_with_symbolic": agree,
                "max_abs_diff": diff,
                "operator": to_value(&op.to_json()),
            });
            Ok(Outcome { report, passed: agree })
        }
    }
}

fn run_verify<S: VerifyScalar>(w: Weights<S::Real>, suite: Suite, cfg: VerifyConfig) -> CmdResult {
    let rep = verify::<S>(w, suite, &cfg)?;
    Ok(Outcome { passed: rep.passed, report: to_value(&rep) })
}

fn quantize<S: VerifyScalar>(
    w: Weights<S::Real>,
    unitary: Option<&Path>,
    check: Check,
    cut: usize,
    samples: usize,
    seed: u64,
) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = w.d();
    let u = match unitary {
        Some(p) => {
            let j: UnitaryJson = read_json(p)?;
            UnitaryMatrix::<S>::from_json(&j).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => S::random_unitary(d, &mut rng),
    };
    if u.d() != d {
        return Err(Failure::Usage(format!("unitary has d = {}, weights d = {d}", u.d())));
    }
    let counterexample = || -> CmdResult {
        let (i0, j0) = distinct_pair(&w)
            .ok_or_else(|| Failure::Usage("the counterexample needs two distinct weights".into()))?;
        let rep = counterexample_report::<S>(&w, i0, j0, cut.max(2))?;
        let passed = !rep.image_is_harmonic && rep.witness_is_multiple_of_vacuum_projection;
        Ok(Outcome { report: to_value(&rep), passed })
    };
    let basis = |rng: &mut ChaCha8Rng| -> CmdResult {
        let rep = basis_independence_random::<S, _>(&w, &u, cut, samples, rng)?;
        Ok(Outcome { passed: rep.passed, report: to_value(&rep) })
    };
    match check {
        Check::Counterexample => counterexample(),
        Check::Basis => basis(&mut rng),
        Check::Auto if w.is_uniform() => {
            let auto = automorphism_check(&u, &w, samples, 2, &mut rng)?;
            let b = basis(&mut rng)?;
            Ok(Outcome {
                passed: auto.passed && b.passed,
                report: json!({ "automorphism": to_value(&auto), "basis_independence": b.report }),
            })
        }
        Check::Auto => {
            let c = counterexample()?;
            let b = basis(&mut rng)?;
            Ok(Outcome {
                passed: c.passed && b.passed,
                report: json!({ "counterexample": c.report, "basis_independence": b.report }),
            })
        }
    }
}

fn distinct_pair<R: Real>(w: &WeightVector<R>) -> Option<(u8, u8)> {
    let d = w.d() as u8;
    (1..=d)
        .flat_map(|a| (a + 1..=d).map(move |b| (a, b)))
        .find(|&(a, b)| !w.get(a).approx_eq(w.get(b)))
}

fn probe<S: VerifyScalar>(
    w: Weights<S::Real>,
    kind: ProbeKind,
    max_len: usize,
    element: Option<&Path>,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let load = |default: CuntzElement<S>| -> Result<CuntzElement<S>, Failure> {
        match element {
            Some(p) => read_element::<S>(p, &w),
            None => Ok(default),
        }
    };
    match kind {
        ProbeKind::Masa => {
            let rep = masa_commutant_probe::<S>(&w, max_len)?;
            Ok(Outcome { passed: rep.equals_diagonal_span, report: to_value(&rep) })
        }
        ProbeKind::Center => {
            let x = load(CuntzElement::one(&w))?;
            let rep = center_probe(&x, max_len, trials, &mut rng)?;
            Ok(Outcome { passed: rep.all_pass(), report: to_value(&rep) })
        }
        ProbeKind::Dr => {
            let mut reports = Vec::new();
            let mut passed = true;
            for i in Word::all_up_to(w.d(), max_len).into_iter().filter(|i| !i.is_empty()) {
                let rep = dr_convergence::<S>(&w, &i, n_max)?;
                passed &= rep.n0.is_some() && rep.stays_zero;
                reports.push(to_value(&rep));
            }
            Ok(Outcome { report: Value::from(reports), passed })
        }
        ProbeKind::Diffuse => {
            let one = Word::from_letters(&[1]);
            let q = load(CuntzElement::m(&w, &one, &one))?;
            let rep = minimal_projection_probe(&q, max_len)?;
            Ok(Outcome { passed: rep.split_length.is_some(), report: to_value(&rep) })
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Classify { weights: w, tol, min_poly } => classify(cli, w, *tol, min_poly),
        Command::Spectrum { weights: w, max_len } => spectrum(cli, w, *max_len),
        Command::Product { weights: w, left, right, method, cut, max_steps } => {
            dispatch!(cli.mode, w, product(left, right, *method, *cut, *max_steps))
        }
        Command::Verify { suite, weights: w, trials, max_len, cut } => {
            let cfg = VerifyConfig { trials: *trials, seed: cli.seed, max_len: *max_len, cut: *cut };
            dispatch!(cli.mode, w, run_verify(Suite::from(*suite), cfg))
        }
        Command::Quantize { weights: w, unitary, check, cut, samples } => {
            dispatch!(cli.mode, w, quantize(unitary.as_deref(), *check, *cut, *samples, cli.seed))
        }
        Command::Probe { kind, weights: w, max_len, element, n_max, trials } => {
            dispatch!(cli.mode, w, probe(*kind, *max_len, element.as_deref(), *n_max, *trials, cli.seed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.report).expect("JSON values serialize") + "\n";
            print!("{text}");
            if let Some(path) = &cli.json {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
