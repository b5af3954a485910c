//! Zero-full verdicts for `H^f(W ∩ C(b, D))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::exponent::{GammaAffine, GammaCtx, LogExpr};
use super::psi::{DimensionFunctionSpec, PsiSpec, SequenceSpec};
use super::series::{large_psi_infinitely_often, Behavior, DecisionBasis, Rounding, Series, SeriesDiagnostics, Shift};
use crate::cantor::CantorParams;
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::regime::{analyze, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// `H^f(W ∩ C) = 0`.
    Zero,
    /// `H^f(W ∩ C) = H^f(C)`.
    Full,
    /// The divergence and convergence series disagree.
    Inconclusive,
    /// No symbolic decision was possible.
    Undecided,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Zero => "Zero",
            Outcome::Full => "Full",
            Outcome::Inconclusive => "Inconclusive",
            Outcome::Undecided => "Undecided",
        })
    }
}

/// Which zero-full law produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// Denominators are powers of the Cantor base itself.
    BaseEqual,
    /// `t` multiplicatively dependent on `b`, `D` touching `0` or `b-1`.
    Dependent,
    /// `t` with the same prime divisors as `b`.
    SamePrimes,
    /// Different prime divisors; only a conjectured law exists.
    IndependentConjecture,
}

impl Law {
    pub fn is_conjecture(&self) -> bool {
        matches!(self, Law::IndependentConjecture)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub law: Law,
    pub outcome: Outcome,
    pub series: Vec<SeriesDiagnostics>,
    /// Whether `ψ_A(i) >= t^-i / 2` infinitely often, when decidable.
    pub large_psi: Option<bool>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Zero | Outcome::Full => 0,
            Outcome::Inconclusive => 3,
            Outcome::Undecided => 4,
        }
    }
}

fn decided(d: &SeriesDiagnostics, b: Behavior) -> bool {
    d.decision_basis == DecisionBasis::Symbolic && d.behavior == b
}

/// Combines the convergence-part series and the divergence-part series.
fn combine(law: Law, zero: SeriesDiagnostics, full: Option<SeriesDiagnostics>, notes: Vec<String>) -> Verdict {
    let full_ref = full.as_ref().unwrap_or(&zero);
    let zero_conv = decided(&zero, Behavior::Converges);
    let full_div = decided(full_ref, Behavior::Diverges);
    let mut notes = notes;
    let outcome = match (zero_conv, full_div) {
        (true, false) => Outcome::Zero,
        (false, true) => Outcome::Full,
        (true, true) => {
            notes.push("convergence and divergence series contradict each other".into());
            Outcome::Undecided
        }
        (false, false) => {
            if decided(&zero, Behavior::Diverges) && decided(full_ref, Behavior::Converges) {
                Outcome::Inconclusive
            } else {
                Outcome::Undecided
            }
        }
    };
    let mut series = vec![zero];
    series.extend(full);
    Verdict {
        law,
        outcome,
        series,
        large_psi: None,
        notes,
    }
}

/// Applies the large-radius rule: when `ψ_A(i) >= t^-i/2` infinitely often
/// the ball rewriting does not apply; every point is then approximated, so
/// the answer is Full exactly when the divergence series confirms
/// `H^f(C) > 0` is not in the way.
fn large_psi_escape(mut v: Verdict, psi: &PsiSpec, t: u64, ctx: &GammaCtx) -> Result<Verdict> {
    v.large_psi = large_psi_infinitely_often(psi, t, ctx)?;
    if v.large_psi == Some(true) {
        let full = v.series.last().expect("at least one series");
        if decided(full, Behavior::Diverges) {
            v.outcome = Outcome::Full;
            v.notes.push("ψ_A(i) >= t^-i/2 infinitely often: the approximable set is all of [0, 1]".into());
        } else {
            v.outcome = Outcome::Undecided;
            v.notes.push("ψ_A(i) >= t^-i/2 infinitely often but divergence is not established".into());
        }
    }
    Ok(v)
}

fn hypothesis_notes(f: &DimensionFunctionSpec, ctx: &GammaCtx) -> (bool, Vec<String>) {
    let report = f.monotonicity(ctx);
    let mut notes = vec![format!(
        "r^-γ f(r) is {:?} on r = 2^-k, k in {}..={}",
        report.direction, report.grid.0, report.grid.1
    )
    .to_lowercase()];
    if f.s.sign(ctx) == Some(std::cmp::Ordering::Less) {
        notes.push(format!("exponent s = {} is negative, f is not a dimension function", f.s));
        return (false, notes);
    }
    if !report.admissible {
        notes.push("r^-γ f(r) is not monotonic, so the law does not apply".into());
    }
    (report.admissible, notes)
}

fn shifted_series<'a>(
    label: &str,
    params: &CantorParams,
    t: u64,
    f: &DimensionFunctionSpec,
    psi: &'a PsiSpec,
    alpha: &Rational,
    rounding: Rounding,
) -> Series<'a> {
    let ctx = GammaCtx::of(params);
    Series {
        label: label.into(),
        psi,
        t,
        f: f.clone(),
        weight: LogExpr::ln(ctx.digits, alpha.clone()),
        shift: Some(Shift {
            m: params.m(),
            base: params.base() as u64,
            alpha: alpha.clone(),
            rounding,
        }),
        ctx,
    }
}

fn gated(mut v: Verdict, admissible: bool) -> Verdict {
    if !admissible {
        v.outcome = Outcome::Undecided;
    }
    v
}

/// Law for denominators `b^{a_n}`: the series over indices with
/// `ψ_A(i) > m / ((b-1) b^i)` of `f(ψ_A(i) - m/((b-1)b^i)) b^{iγ}`.
pub fn verdict_base_equal(params: &CantorParams, f: &DimensionFunctionSpec, psi: &PsiSpec) -> Result<Verdict> {
    psi.validate()?;
    let ctx = GammaCtx::of(params);
    let b = params.base() as u64;
    let (admissible, notes) = hypothesis_notes(f, &ctx);
    let series = shifted_series("shifted series", params, b, f, psi, &Rational::one(), Rounding::Ceil);
    let v = combine(Law::BaseEqual, series.analyze()?, None, notes);
    Ok(gated(large_psi_escape(v, psi, b, &ctx)?, admissible))
}

/// Law for `t` multiplicatively dependent on `b` when `D` contains `0` or
/// `b - 1`: the series `Σ f(ψ_A(i)) t^{iγ}`.
pub fn verdict_dependent(params: &CantorParams, t: u64, f: &DimensionFunctionSpec, psi: &PsiSpec) -> Result<Verdict> {
    psi.validate()?;
    let report = analyze(params.base() as u64, t)?;
    if !report.mult_dependent {
        return Err(Error::Precondition(format!(
            "{} and {t} are not multiplicatively dependent ({} regime)",
            params.base(),
            report.regime
        )));
    }
    if !params.touches_boundary() {
        return Err(Error::Precondition(format!(
            "{params}: D contains neither 0 nor b-1; use verdict_main, whose series carry the shift m/((b-1)b^i)"
        )));
    }
    let ctx = GammaCtx::of(params);
    let (admissible, notes) = hypothesis_notes(f, &ctx);
    let mut weight = LogExpr::zero();
    weight.add_gamma(t, Rational::one());
    let series = Series {
        label: "series".into(),
        psi,
        t,
        f: f.clone(),
        weight,
        shift: None,
        ctx,
    };
    let v = combine(Law::Dependent, series.analyze()?, None, notes);
    Ok(gated(large_psi_escape(v, psi, t, &ctx)?, admissible))
}

/// Law for `t` sharing its prime divisors with `b`: the convergence part
/// uses `⌈iα₂⌉` and weight `b^{iα₂γ}`, the divergence part `⌊iα₁⌋` and
/// `b^{iα₁γ}`.
pub fn verdict_main(params: &CantorParams, t: u64, f: &DimensionFunctionSpec, psi: &PsiSpec) -> Result<Verdict> {
    psi.validate()?;
    let report = analyze(params.base() as u64, t)?;
    if !report.same_primes {
        return Err(Error::Precondition(format!(
            "{} and {t} have different prime divisors; only the conjectured law applies (conjecture_independent)",
            params.base()
        )));
    }
    let ctx = GammaCtx::of(params);
    let (admissible, mut notes) = hypothesis_notes(f, &ctx);
    let alpha1 = report.alpha1.expect("same primes");
    let alpha2 = report.alpha2.expect("same primes");
    notes.push(format!("α₁ = {alpha1}, α₂ = {alpha2}, m = {}", params.m()));
    let zero = shifted_series("convergence part (⌈iα₂⌉)", params, t, f, psi, &alpha2, Rounding::Ceil).analyze()?;
    let full = shifted_series("divergence part (⌊iα₁⌋)", params, t, f, psi, &alpha1, Rounding::Floor).analyze()?;
    let v = combine(Law::SamePrimes, zero, Some(full), notes);
    Ok(gated(large_psi_escape(v, psi, t, &ctx)?, admissible))
}

/// The conjectured law for different prime divisors:
/// `Σ f(ψ(n)) t^n ψ(n)^{1-γ}`. The result is not a theorem.
pub fn conjecture_independent(params: &CantorParams, t: u64, f: &DimensionFunctionSpec, psi: &PsiSpec) -> Result<Verdict> {
    psi.validate()?;
    let report = analyze(params.base() as u64, t)?;
    if report.same_primes {
        return Err(Error::Precondition(format!(
            "{} and {t} share their prime divisors; use verdict_main",
            params.base()
        )));
    }
    if !params.touches_boundary() {
        return Err(Error::Precondition(format!("{params}: D contains neither 0 nor b-1")));
    }
    if psi.sequence != SequenceSpec::Identity {
        return Err(Error::Precondition("the conjectured law is stated for a_n = n only".into()));
    }
    let ctx = GammaCtx::of(params);
    let (admissible, mut notes) = hypothesis_notes(f, &ctx);
    notes.push("conjectural law: the outcome is a prediction, not a theorem".into());
    // f(ψ) ψ^{1-γ} = r^{s + 1 - γ} (ln 1/r)^c at r = ψ.
    let shifted = DimensionFunctionSpec::new(
        f.s.add(&GammaAffine {
            rational: Rational::one(),
            gamma: -Rational::one(),
        }),
        f.c.clone(),
    );
    let series = Series {
        label: "conjectured series".into(),
        psi,
        t,
        f: shifted,
        weight: LogExpr::ln(t, Rational::one()),
        shift: None,
        ctx,
    };
    let v = combine(Law::IndependentConjecture, series.analyze()?, None, notes);
    Ok(gated(large_psi_escape(v, psi, t, &ctx)?, admissible))
}

/// Picks the strongest applicable law for `(b, t)`.
pub fn verdict(params: &CantorParams, t: u64, f: &DimensionFunctionSpec, psi: &PsiSpec) -> Result<Verdict> {
    let report = analyze(params.base() as u64, t)?;
    match report.regime {
        _ if t == params.base() as u64 => verdict_base_equal(params, f, psi),
        Regime::MultiplicativelyDependent if params.touches_boundary() => verdict_dependent(params, t, f, psi),
        Regime::MultiplicativelyDependent | Regime::SamePrimesIndependent => verdict_main(params, t, f, psi),
        Regime::DifferentPrimes => conjecture_independent(params, t, f, psi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::psi::PsiFamily;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn c(b: u32, d: &[u32]) -> CantorParams {
        CantorParams::new(b, d).unwrap()
    }

    fn f(s: &str) -> DimensionFunctionSpec {
        DimensionFunctionSpec::power(s.parse().unwrap())
    }

    fn pow_base(c: Rational, theta: Rational, base: u64) -> PsiSpec {
        PsiSpec::new(
            PsiFamily::PowerDecay { c, theta, base: Some(base) },
            SequenceSpec::Identity,
        )
        .unwrap()
    }

    #[test]
    fn base_equal_examples() {
        let p = c(3, &[0, 2]);
        let psi = PsiSpec::power(r(1, 1), r(2, 1)).unwrap();
        assert_eq!(verdict_base_equal(&p, &f("2/5"), &psi).unwrap().outcome, Outcome::Zero);
        assert_eq!(verdict_base_equal(&p, &f("3/10"), &psi).unwrap().outcome, Outcome::Full);
        let psi = PsiSpec::power(r(1, 1), r(1, 1)).unwrap();
        assert_eq!(verdict_base_equal(&p, &f("gamma"), &psi).unwrap().outcome, Outcome::Full);
        // s = γ/θ exactly sits on the divergent side
        let psi = PsiSpec::power(r(1, 1), r(2, 1)).unwrap();
        assert_eq!(verdict_base_equal(&p, &f("gamma/2"), &psi).unwrap().outcome, Outcome::Full);
    }

    #[test]
    fn empty_family_is_zero() {
        let p = c(5, &[1, 2]);
        let psi = PsiSpec::power(r(1, 4), r(1, 1)).unwrap();
        for s in ["0", "1/10", "gamma"] {
            assert_eq!(verdict_base_equal(&p, &f(s), &psi).unwrap().outcome, Outcome::Zero, "s={s}");
        }
    }

    #[test]
    fn dependent_examples() {
        let p = c(3, &[0, 2]);
        let psi = PsiSpec::power(r(1, 1), r(2, 1)).unwrap();
        assert_eq!(verdict_dependent(&p, 9, &f("3/10"), &psi).unwrap().outcome, Outcome::Full);
        assert_eq!(verdict_dependent(&p, 9, &f("2/5"), &psi).unwrap().outcome, Outcome::Zero);
        let p4 = c(4, &[0, 3]);
        let psi = PsiSpec::power(r(1, 1), r(1, 1)).unwrap();
        assert_eq!(verdict_dependent(&p4, 8, &f("gamma"), &psi).unwrap().outcome, Outcome::Full);
        assert!(matches!(
            verdict_dependent(&c(4, &[1, 2]), 16, &f("1/2"), &psi),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(verdict_dependent(&p, 6, &f("1/2"), &psi), Err(Error::Precondition(_))));
    }

    #[test]
    fn same_primes_examples() {
        let p = c(12, &[0, 6]);
        // ψ(n) = 12^{-2n} with f = r^s and 2s in {γ, 3γ, γ/4}
        let psi = pow_base(r(1, 1), r(2, 1), 12);
        let v = verdict_main(&p, 18, &f("gamma/2"), &psi).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.exit_code(), 3);
        assert_eq!(verdict_main(&p, 18, &f("3/2*gamma"), &psi).unwrap().outcome, Outcome::Zero);
        assert_eq!(verdict_main(&p, 18, &f("gamma/8"), &psi).unwrap().outcome, Outcome::Full);
        // with θ = 1 the radii exceed 18^-n / 2, so the ball rewriting is bypassed
        let wide = pow_base(r(1, 1), r(1, 1), 12);
        let v = verdict_main(&p, 18, &f("gamma"), &wide).unwrap();
        assert_eq!(v.large_psi, Some(true));
        assert_eq!(v.outcome, Outcome::Undecided);
        assert!(matches!(verdict_main(&p, 5, &f("gamma"), &psi), Err(Error::Precondition(_))));
    }

    #[test]
    fn conjecture_for_different_primes() {
        let p = c(3, &[0, 2]);
        // ψ = 2^{-θn}: exponent ln2 (1 - θ(s + 1 - γ))
        let psi = PsiSpec::power(r(1, 1), r(6, 5)).unwrap();
        let v = conjecture_independent(&p, 2, &f("0"), &psi).unwrap();
        assert_eq!(v.law, Law::IndependentConjecture);
        assert_eq!(v.outcome, Outcome::Full);
        let v = conjecture_independent(&p, 2, &f("1/2"), &psi).unwrap();
        assert_eq!(v.outcome, Outcome::Zero);
    }

    #[test]
    fn numeric_only_is_undecided() {
        let p = c(3, &[0, 2]);
        let values = (1..=200).map(|n| Rational::integer_pow(3, -2 * n)).collect();
        let psi = PsiSpec::new(PsiFamily::Table { values }, SequenceSpec::Identity).unwrap();
        let v = verdict_base_equal(&p, &f("2/5"), &psi).unwrap();
        assert_eq!(v.outcome, Outcome::Undecided);
        assert_eq!(v.exit_code(), 4);
    }

    #[test]
    fn large_radii_escape() {
        let p = c(3, &[0, 2]);
        let psi = PsiSpec::power(r(1, 1), r(1, 2)).unwrap();
        let v = verdict_base_equal(&p, &f("1/2"), &psi).unwrap();
        assert_eq!(v.large_psi, Some(true));
        assert_eq!(v.outcome, Outcome::Full);
    }

    #[test]
    fn dispatch_matches_regime() {
        let p = c(3, &[0, 2]);
        let psi = PsiSpec::power(r(1, 1), r(2, 1)).unwrap();
        assert_eq!(verdict(&p, 3, &f("1/2"), &psi).unwrap().law, Law::BaseEqual);
        assert_eq!(verdict(&p, 9, &f("1/2"), &psi).unwrap().law, Law::Dependent);
        assert_eq!(verdict(&c(4, &[1, 2]), 16, &f("1/2"), &psi).unwrap().law, Law::SamePrimes);
        assert_eq!(verdict(&p, 2, &f("1/2"), &psi).unwrap().law, Law::IndependentConjecture);
        assert_eq!(verdict(&c(12, &[0, 6]), 18, &f("1/2"), &psi).unwrap().law, Law::SamePrimes);
    }
}
