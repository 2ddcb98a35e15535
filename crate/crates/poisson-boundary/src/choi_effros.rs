//! The Choi–Effros product `x∘y = lim Pⁿ(xy)` on truncated operators, the closed-form
//! mixed products with right creations, and Cesàro projection onto harmonic operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_vacuum_projection, build_word_operator, is_harmonic, markov_step, Kind, Side, TruncatedOperator};
use crate::scalar::{Real, Scalar};
use crate::word::{WeightVector, Word};

fn describe<S: Scalar>(x: &TruncatedOperator<S>) -> String {
    let entries: Vec<String> = x
        .entries()
        .take(64)
        .map(|(r, c, v)| format!("({r},{c})={}", v.to_c64()))
        .collect();
    format!("cut={} exact={:?} nnz={} [{}]", x.cut(), x.exact_block(), x.nnz(), entries.join(", "))
}

/// `max_steps` default: `cut − degree − 1`.
pub fn default_max_steps(cut: usize, degree: usize) -> usize {
    cut.saturating_sub(degree + 1)
}

/// Result of iterating the Markov operator until it is stationary on the surviving block.
#[derive(Debug, Clone)]
pub struct Stabilized<S: Scalar> {
    pub operator: TruncatedOperator<S>,
    /// Smallest `k` with `P^{k+1}(z) = P^k(z)` on the exact block.
    pub steps_used: usize,
}

/// Iterates `z, P(z), P²(z), …` until two consecutive iterates agree on the exact block of
/// the later one, which is returned.
pub fn stabilize<S: Scalar>(z: TruncatedOperator<S>, w: &WeightVector<S::Real>, max_steps: usize) -> Result<Stabilized<S>> {
    let mut prev = z;
    for k in 0..=max_steps {
        if prev.cut() == 0 || prev.exact_block().is_none_or(|e| e == 0) {
            break;
        }
        let next = markov_step(&prev, w)?;
        let Some(block) = next.exact_block() else { break };
        if prev.compare_on_block(&next, block).0 {
            return Ok(Stabilized { operator: next, steps_used: k });
        }
        prev = next;
        if k == max_steps {
            let last = markov_step(&prev, w).ok();
            return Err(not_stabilized(max_steps + 1, &prev, last.as_ref()));
        }
    }
    Err(not_stabilized(max_steps, &prev, None))
}

fn not_stabilized<S: Scalar>(steps: usize, a: &TruncatedOperator<S>, b: Option<&TruncatedOperator<S>>) -> Error {
    Error::NotStabilized {
        steps,
        last_two: Box::new((describe(a), b.map(describe).unwrap_or_else(|| "cut exhausted".into()))),
    }
}

/// `x∘y` as the stabilized limit of `Pⁿ(xy)`. Returns the operator and the number of Markov
/// steps after which the iterates were stationary.
pub fn product_iterative<S: Scalar>(
    x: &TruncatedOperator<S>,
    y: &TruncatedOperator<S>,
    w: &WeightVector<S::Real>,
    max_steps: usize,
) -> Result<(TruncatedOperator<S>, usize)> {
    let z = x.compose(y)?;
    let s = stabilize(z, w, max_steps)?;
    Ok((s.operator, s.steps_used))
}

/// The seven closed-form products with right creations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum MixedForm {
    /// `x ∘ r_I = x r_I`
    I { i: Word },
    /// `r_I* ∘ x = r_I* x`
    Ii { i: Word },
    /// `r_J* ∘ x ∘ r_I = r_J* x r_I`
    Iii { i: Word, j: Word },
    /// `r_I ∘ x = r_I x + Σ_t ω_{(I^op)_t} r_{I_{|I|−t}} p_Ω x l_{(I^op)_t}`
    Iv { i: Word },
    /// `x ∘ r_I* = x r_I* + Σ_t ω_{(I^op)_t} l*_{(I^op)_t} x p_Ω r*_{I_{|I|−t}}`
    V { i: Word },
    /// `x ∘ r_I ∘ r_J* = x r_I r_J* + Σ_t ω_{(J^op)_t} l*_{(J^op)_t} x r_I p_Ω r*_{J_{|J|−t}}`
    Vi { i: Word, j: Word },
    /// `r_I ∘ r_J* ∘ x = r_I r_J* x + Σ_t ω_{(I^op)_t} r_{I_{|I|−t}} p_Ω r_J* x l_{(I^op)_t}`
    Vii { i: Word, j: Word },
}

impl MixedForm {
    pub fn label(&self) -> &'static str {
        match self {
            MixedForm::I { .. } => "i",
            MixedForm::Ii { .. } => "ii",
            MixedForm::Iii { .. } => "iii",
            MixedForm::Iv { .. } => "iv",
            MixedForm::V { .. } => "v",
            MixedForm::Vi { .. } => "vi",
            MixedForm::Vii { .. } => "vii",
        }
    }

    pub fn words(&self) -> Vec<&Word> {
        match self {
            MixedForm::I { i } | MixedForm::Ii { i } | MixedForm::Iv { i } | MixedForm::V { i } => vec![i],
            MixedForm::Iii { i, j } | MixedForm::Vi { i, j } | MixedForm::Vii { i, j } => vec![i, j],
        }
    }
}

/// Builder for the operator words appearing in the closed forms, all at one cut.
struct Ops<'a, S: Scalar> {
    d: usize,
    cut: usize,
    w: &'a WeightVector<S::Real>,
    _s: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar> Ops<'a, S> {
    fn op(&self, side: Side, kind: Kind, k: &Word) -> Result<TruncatedOperator<S>> {
        build_word_operator(side, kind, k, self.d, self.cut)
    }
    fn r(&self, k: &Word) -> Result<TruncatedOperator<S>> {
        self.op(Side::Right, Kind::Creation, k)
    }
    fn rs(&self, k: &Word) -> Result<TruncatedOperator<S>> {
        self.op(Side::Right, Kind::Annihilation, k)
    }
    fn l(&self, k: &Word) -> Result<TruncatedOperator<S>> {
        self.op(Side::Left, Kind::Creation, k)
    }
    fn ls(&self, k: &Word) -> Result<TruncatedOperator<S>> {
        self.op(Side::Left, Kind::Annihilation, k)
    }
    fn p(&self) -> TruncatedOperator<S> {
        build_vacuum_projection(self.d, self.cut)
    }
    fn weight(&self, k: &Word) -> S {
        S::from_real(&self.w.word_weight(k))
    }
}

fn chain<S: Scalar>(ops: &[&TruncatedOperator<S>]) -> Result<TruncatedOperator<S>> {
    let (first, rest) = ops.split_first().expect("nonempty chain");
    rest.iter().try_fold((*first).clone(), |acc, o| acc.compose(o))
}

/// Evaluates one of the closed-form mixed products for harmonic `x`.
pub fn closed_form_mixed<S: Scalar>(form: &MixedForm, x: &TruncatedOperator<S>, w: &WeightVector<S::Real>) -> Result<TruncatedOperator<S>> {
    for k in form.words() {
        k.check_alphabet(x.d())?;
    }
    let report = is_harmonic(x, w)?;
    if !report.is_harmonic() {
        let at = report
            .defects
            .first()
            .map(|d| format!("entry ({}, {})", d.row, d.col))
            .unwrap_or_else(|| "empty exact block".into());
        return Err(Error::NotHarmonic(at));
    }
    let o = Ops::<S> { d: x.d(), cut: x.cut(), w, _s: std::marker::PhantomData };
    match form {
        MixedForm::I { i } => x.compose(&o.r(i)?),
        MixedForm::Ii { i } => o.rs(i)?.compose(x),
        MixedForm::Iii { i, j } => chain(&[&o.rs(j)?, x, &o.r(i)?]),
        MixedForm::Iv { i } => {
            let mut acc = o.r(i)?.compose(x)?;
            let iop = i.reverse();
            for t in 1..=i.len() {
                let head = iop.prefix(t);
                let term = chain(&[&o.r(&i.prefix(i.len() - t))?, &o.p(), x, &o.l(&head)?])?;
                acc = acc.add(&term.scale(&o.weight(&head)))?;
            }
            Ok(acc)
        }
        MixedForm::V { i } => {
            let mut acc = x.compose(&o.rs(i)?)?;
            let iop = i.reverse();
            for t in 1..=i.len() {
                let head = iop.prefix(t);
                let term = chain(&[&o.ls(&head)?, x, &o.p(), &o.rs(&i.prefix(i.len() - t))?])?;
                acc = acc.add(&term.scale(&o.weight(&head)))?;
            }
            Ok(acc)
        }
        MixedForm::Vi { i, j } => {
            let ri = o.r(i)?;
            let mut acc = chain(&[x, &ri, &o.rs(j)?])?;
            let jop = j.reverse();
            for t in 1..=j.len() {
                let head = jop.prefix(t);
                let term = chain(&[&o.ls(&head)?, x, &ri, &o.p(), &o.rs(&j.prefix(j.len() - t))?])?;
                acc = acc.add(&term.scale(&o.weight(&head)))?;
            }
            Ok(acc)
        }
        MixedForm::Vii { i, j } => {
            let rsj = o.rs(j)?;
            let mut acc = chain(&[&o.r(i)?, &rsj, x])?;
            let iop = i.reverse();
            for t in 1..=i.len() {
                let head = iop.prefix(t);
                let term = chain(&[&o.r(&i.prefix(i.len() - t))?, &o.p(), &rsj, x, &o.l(&head)?])?;
                acc = acc.add(&term.scale(&o.weight(&head)))?;
            }
            Ok(acc)
        }
    }
}

/// Computes the same product as [`closed_form_mixed`] through the iterative definition.
/// The right creations are realized as exact compressions at the cut of `x`.
pub fn mixed_iterative<S: Scalar>(
    form: &MixedForm,
    x: &TruncatedOperator<S>,
    w: &WeightVector<S::Real>,
    max_steps: usize,
) -> Result<(TruncatedOperator<S>, usize)> {
    let o = Ops::<S> { d: x.d(), cut: x.cut(), w, _s: std::marker::PhantomData };
    let element = |i: &Word, j: &Word| -> Result<TruncatedOperator<S>> {
        let weights = std::sync::Arc::new(w.clone());
        crate::cuntz::CuntzElement::<S>::m(&weights, i, j).to_truncated(x.cut())
    };
    match form {
        MixedForm::I { i } => product_iterative(x, &o.r(i)?, w, max_steps),
        MixedForm::Ii { i } => product_iterative(&o.rs(i)?, x, w, max_steps),
        MixedForm::Iii { i, j } => {
            let (left, s1) = product_iterative(&o.rs(j)?, x, w, max_steps)?;
            let ri = o.r(i)?.recut(left.cut())?;
            let (out, s2) = product_iterative(&left, &ri, w, max_steps)?;
            Ok((out, s1.max(s2)))
        }
        MixedForm::Iv { i } => product_iterative(&o.r(i)?, x, w, max_steps),
        MixedForm::V { i } => product_iterative(x, &o.rs(i)?, w, max_steps),
        MixedForm::Vi { i, j } => product_iterative(x, &element(i, j)?, w, max_steps),
        MixedForm::Vii { i, j } => product_iterative(&element(i, j)?, x, w, max_steps),
    }
}

/// How a Cesàro projection was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CesaroMethod {
    /// Two successive means agree on the surviving block.
    MeanAgreement,
    /// The orbit `Pᵏ(x)` became constant; the means converge to that constant.
    OrbitExtrapolation,
    /// The cut ran out first; the last mean is returned.
    Exhausted,
}

#[derive(Debug, Clone)]
pub struct CesaroResult<S: Scalar> {
    pub projection: TruncatedOperator<S>,
    pub stabilized: bool,
    pub method: CesaroMethod,
    /// Number of Markov iterates used.
    pub iterates: usize,
}

/// Cesàro means `(1/n) Σ_{k<n} Pᵏ(x)` with detected stabilization. When the orbit itself is
/// eventually constant from `k₀`, the means converge to `P^{k₀}(x)`; in particular a
/// nilpotent orbit projects to zero.
pub fn cesaro_project<S: Scalar>(x: &TruncatedOperator<S>, w: &WeightVector<S::Real>, max_n: usize) -> Result<CesaroResult<S>> {
    let mut iterates = vec![x.clone()];
    let mut prev_mean: Option<TruncatedOperator<S>> = None;
    for n in 1..=max_n.max(1) {
        let last = iterates.last().expect("orbit is nonempty").clone();
        let mean = mean_of(&iterates)?;
        if let Some(pm) = &prev_mean {
            if let Some(block) = mean.exact_block() {
                let pm = pm.recut(mean.cut())?;
                if pm.compare_on_block(&mean, block).0 {
                    return Ok(CesaroResult { projection: mean, stabilized: true, method: CesaroMethod::MeanAgreement, iterates: n });
                }
            }
        }
        if last.cut() == 0 || last.exact_block().is_none_or(|e| e == 0) {
            return Ok(CesaroResult { projection: mean, stabilized: false, method: CesaroMethod::Exhausted, iterates: n });
        }
        let next = markov_step(&last, w)?;
        if let Some(block) = next.exact_block() {
            if last.compare_on_block(&next, block).0 && n >= 2 {
                return Ok(CesaroResult { projection: next, stabilized: true, method: CesaroMethod::OrbitExtrapolation, iterates: n });
            }
        }
        prev_mean = Some(mean);
        iterates.push(next);
    }
    let mean = mean_of(&iterates)?;
    Ok(CesaroResult { projection: mean, stabilized: false, method: CesaroMethod::Exhausted, iterates: iterates.len() })
}

fn mean_of<S: Scalar>(orbit: &[TruncatedOperator<S>]) -> Result<TruncatedOperator<S>> {
    let cut = orbit.last().expect("nonempty").cut();
    let mut acc = TruncatedOperator::zero(orbit[0].d(), cut);
    for z in orbit {
        acc = acc.add(&z.recut(cut)?)?;
    }
    let inv = S::from_real(&S::Real::from_ratio(1, orbit.len() as i64));
    Ok(acc.scale(&inv))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuntz::CuntzElement;
    use crate::scalar::Exact;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        Word::parse(s, 9).unwrap()
    }

    fn om() -> WeightVector<BigRational> {
        WeightVector::parse("1/3,2/3").unwrap()
    }

    #[test]
    fn r1_times_r1_star() {
        let cut = 8;
        let r1 = build_word_operator::<Exact>(Side::Right, Kind::Creation, &w("1"), 2, cut).unwrap();
        let (p, steps) = product_iterative(&r1, &r1.adjoint(), &om(), 6).unwrap();
        assert_eq!(steps, 1);
        let weights = Arc::new(om());
        let want = CuntzElement::<Exact>::m(&weights, &w("1"), &w("1")).to_truncated(p.cut()).unwrap();
        let block = p.exact_block().unwrap();
        assert!(block >= 5);
        assert!(p.compare_on_block(&want, block).0);
    }

    #[test]
    fn identity_factor_needs_no_steps() {
        let cut = 6;
        let r = build_word_operator::<Exact>(Side::Right, Kind::Creation, &w("21"), 2, cut).unwrap();
        let (p, steps) = product_iterative(&r, &TruncatedOperator::identity(2, cut), &om(), 4).unwrap();
        assert_eq!(steps, 0);
        assert!(p.compare_on_block(&r.recut(p.cut()).unwrap(), p.exact_block().unwrap()).0);
    }

    #[test]
    fn closed_forms_examples() {
        let cut = 6;
        let weights = Arc::new(om());
        let x = CuntzElement::<Exact>::m(&weights, &w("2"), &w("2")).to_truncated(cut).unwrap();
        let r1 = build_word_operator::<Exact>(Side::Right, Kind::Creation, &w("1"), 2, cut).unwrap();
        let got = closed_form_mixed(&MixedForm::I { i: w("1") }, &x, &om()).unwrap();
        assert!(got.compare_on_block(&x.compose(&r1).unwrap(), cut - 1).0);

        let one = TruncatedOperator::<Exact>::identity(2, cut);
        let got = closed_form_mixed(&MixedForm::V { i: w("1") }, &one, &om()).unwrap();
        assert!(got.compare_on_block(&r1.adjoint(), got.exact_block().unwrap()).0);

        let l1 = build_word_operator::<Exact>(Side::Left, Kind::Creation, &w("1"), 2, cut).unwrap();
        assert!(matches!(closed_form_mixed(&MixedForm::I { i: w("1") }, &l1, &om()), Err(Error::NotHarmonic(_))));
    }

    #[test]
    fn cesaro_examples() {
        let cut = 8;
        let p = build_vacuum_projection::<Exact>(2, cut);
        let res = cesaro_project(&p, &om(), 8).unwrap();
        assert!(res.stabilized);
        assert!(res.projection.is_zero());

        let r = build_word_operator::<Exact>(Side::Right, Kind::Creation, &w("12"), 2, cut).unwrap();
        let res = cesaro_project(&r, &om(), 8).unwrap();
        assert!(res.stabilized);
        assert_eq!(res.method, CesaroMethod::MeanAgreement);
        assert!(res.projection.compare_on_block(&r.recut(res.projection.cut()).unwrap(), res.projection.exact_block().unwrap()).0);

        let id = TruncatedOperator::<Exact>::identity(2, cut);
        let res = cesaro_project(&id, &om(), 8).unwrap();
        assert!(res.stabilized);
        assert!(res.projection.compare_on_block(&id.recut(res.projection.cut()).unwrap(), 4).0);
    }
}
