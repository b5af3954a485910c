//! Convergence of the zero-full series.
//!
//! Every series handled here has the shape
//!
//! ```text
//! Σ_{i ∈ I, ψ_A(i) > shift(i)}  f(ψ_A(i) - shift(i)) · exp(i · weight)
//! ```
//!
//! with `shift(i) = m / ((b-1) b^{round(i α)})` (or no shift). For the
//! closed-form families `-ln ψ_A(i) = i ρ + β ln i + O(1)` where
//! `ρ = θ ln(base) / u`, so both the qualifying set and the size of the terms
//! are governed by signs of exact logarithmic expressions. Table inputs only
//! get partial sums.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::exponent::{GammaAffine, GammaCtx, LogExpr};
use super::psi::{DimensionFunctionSpec, PsiSpec};
use crate::error::Result;
use crate::exactnum::{PowProduct, Rational};

/// Longest period scanned when the qualifying set is decided by periodicity.
const PERIOD_CAP: u64 = 100_000;

/// Terms summed for diagnostics when the spec is closed form.
const SYMBOLIC_DIAGNOSTIC_TERMS: u64 = 1_000;

/// Terms summed when only numeric evidence is available.
pub const NUMERIC_TERMS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    Floor,
    Ceil,
}

/// `m / ((b - 1) b^{round(i α)})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    pub m: u32,
    pub base: u64,
    pub alpha: Rational,
    pub rounding: Rounding,
}

impl Shift {
    pub fn level(&self, i: u64) -> i64 {
        let x = &self.alpha * Rational::from(i);
        let k = match self.rounding {
            Rounding::Floor => x.floor(),
            Rounding::Ceil => x.ceil(),
        };
        k.to_i64().expect("level fits in i64")
    }

    pub fn ln_value(&self, i: u64) -> f64 {
        (self.m as f64 / (self.base - 1) as f64).ln() - self.level(i) as f64 * (self.base as f64).ln()
    }

    pub fn value(&self, i: u64) -> Rational {
        Rational::from(self.m) / Rational::from(self.base - 1) * Rational::integer_pow(self.base, -self.level(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    Converges,
    Diverges,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionBasis {
    Symbolic,
    NumericAdvisory,
}

/// Which indices contribute terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qualifying {
    /// No shift, every index of `A` counts.
    All,
    /// All but finitely many indices of `A`.
    Cofinite,
    /// A periodic set of positive density.
    Periodic,
    Finite,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub terms: u64,
    /// `log10` of the partial sum; `None` while it is still empty.
    pub log10_sum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub label: String,
    pub behavior: Behavior,
    pub decision_basis: DecisionBasis,
    pub qualifying: Qualifying,
    /// `e^E` for the per-index growth exponent `E` of the terms.
    pub closed_form_ratio: Option<f64>,
    /// Power of `i` multiplying the geometric part of the terms.
    pub log_power: Option<f64>,
    pub partial_sums: Vec<PartialSum>,
    pub reason: String,
}

/// One zero-full series.
#[derive(Debug, Clone)]
pub struct Series<'a> {
    pub label: String,
    pub psi: &'a PsiSpec,
    /// The query base `t`.
    pub t: u64,
    pub f: DimensionFunctionSpec,
    /// Terms carry the factor `exp(i · weight)`.
    pub weight: LogExpr,
    pub shift: Option<Shift>,
    pub ctx: GammaCtx,
}

enum Sign3 {
    Known(Ordering),
    Unknown,
}

fn sign(e: &LogExpr, ctx: &GammaCtx) -> Sign3 {
    match e.sign(ctx) {
        Some(s) => Sign3::Known(s),
        None => Sign3::Unknown,
    }
}

impl Series<'_> {
    fn active_shift(&self) -> Option<&Shift> {
        self.shift.as_ref().filter(|s| s.m > 0)
    }

    /// Exact test `ψ_A(i) > shift(i)`.
    fn qualifies_exact(&self, i: u64, psi: &PowProduct) -> bool {
        match self.active_shift() {
            None => true,
            Some(s) => psi.cmp_rational(&s.value(i)) == Ordering::Greater,
        }
    }

    /// `ln(ψ_A(i) - shift(i))`, or `None` when the index does not qualify.
    fn ln_gap(&self, i: u64, psi: &PowProduct) -> Option<f64> {
        let lp = psi.ln_f64();
        let Some(s) = self.active_shift() else {
            return Some(lp);
        };
        let ls = s.ln_value(i);
        let close = (lp - ls).abs() <= 1e-9 * lp.abs().max(1.0);
        let qualifies = if close { self.qualifies_exact(i, psi) } else { lp > ls };
        if !qualifies {
            return None;
        }
        let ratio = (ls - lp).exp();
        if ratio < 1.0 {
            Some(lp + (-ratio).ln_1p())
        } else {
            // Exactly-decided sliver where floats cannot resolve the gap.
            let gap = psi.to_f64() - s.value(i).to_f64();
            Some(if gap > 0.0 { gap.ln() } else { lp - 40.0 })
        }
    }

    /// Partial sums at `10, 100, ...` up to `limit` terms of `I`.
    pub fn partial_sums(&self, limit: u64) -> Result<Vec<PartialSum>> {
        let weight = self.weight.to_f64(&self.ctx);
        let s_value = self.f.s.to_f64(&self.ctx);
        let horizon = self.psi.horizon();
        let mut out = Vec::new();
        let mut acc: Option<f64> = None;
        let mut n = 1u64;
        let mut last_index = 0u64;
        let mut terms = 0u64;
        let mut checkpoint = 10u64;
        loop {
            if horizon.is_some_and(|h| n > h) || terms >= limit {
                break;
            }
            let i = self.psi.exponent(n)?;
            n += 1;
            if i == last_index {
                continue;
            }
            last_index = i;
            let psi = self.psi.psi_a(i, self.t)?;
            terms += 1;
            if let Some(lg) = self.ln_gap(i, &psi) {
                let lt = self.f.ln_eval_with(lg, s_value) + i as f64 * weight;
                acc = Some(match acc {
                    None => lt,
                    Some(a) => {
                        let (hi, lo) = if a > lt { (a, lt) } else { (lt, a) };
                        hi + (lo - hi).exp().ln_1p()
                    }
                });
            }
            if terms == checkpoint {
                out.push(PartialSum {
                    terms,
                    log10_sum: acc.map(|a| a / std::f64::consts::LN_10),
                });
                checkpoint *= 10;
            }
        }
        if out.last().map(|p| p.terms) != Some(terms) && terms > 0 {
            out.push(PartialSum {
                terms,
                log10_sum: acc.map(|a| a / std::f64::consts::LN_10),
            });
        }
        Ok(out)
    }

    /// Decides convergence.
    pub fn analyze(&self) -> Result<SeriesDiagnostics> {
        if !self.psi.is_symbolic() {
            return self.numeric();
        }
        let (theta, beta) = self.psi.rates().expect("closed form");
        let (slope, offset) = self.psi.affine().expect("affine");
        let base = self.psi.decay_base(self.t);
        let rate = &theta / &slope;
        let rho = LogExpr::ln(base, rate.clone());

        let qualifying = match self.active_shift() {
            None => Qualifying::All,
            Some(shift) => {
                let delta = rho.clone().plus(&LogExpr::ln(shift.base, -shift.alpha.clone()));
                match sign(&delta, &self.ctx) {
                    Sign3::Known(Ordering::Greater) => Qualifying::Finite,
                    Sign3::Known(Ordering::Less) => Qualifying::Cofinite,
                    Sign3::Known(Ordering::Equal) => match beta.signum() {
                        Ordering::Greater => Qualifying::Finite,
                        Ordering::Less => Qualifying::Cofinite,
                        Ordering::Equal => self.periodic_qualifying(shift, &slope, &offset)?,
                    },
                    Sign3::Unknown => Qualifying::Unknown,
                }
            }
        };

        let s = &self.f.s;
        let mut growth = self.weight.clone();
        growth.add_plain(base, -(&s.rational * &rate));
        growth.add_gamma(base, -(&s.gamma * &rate));
        let ratio = growth.to_f64(&self.ctx).exp();
        // ν = c - β s, and ν + 1 = (c + 1 - β s0) - β s1 γ.
        let nu_plus_one = GammaAffine {
            rational: &self.f.c + Rational::one() - &beta * &s.rational,
            gamma: -(&beta * &s.gamma),
        };
        let log_power = nu_plus_one.to_f64(&self.ctx) - 1.0;

        let partial_sums = self.partial_sums(SYMBOLIC_DIAGNOSTIC_TERMS)?;
        let mut diag = SeriesDiagnostics {
            label: self.label.clone(),
            behavior: Behavior::Undetermined,
            decision_basis: DecisionBasis::Symbolic,
            qualifying,
            closed_form_ratio: Some(ratio),
            log_power: Some(log_power),
            partial_sums,
            reason: String::new(),
        };
        match qualifying {
            Qualifying::Finite => {
                diag.behavior = Behavior::Converges;
                diag.reason = "ψ_A(i) eventually stays below the shift, so only finitely many terms".into();
                return Ok(diag);
            }
            Qualifying::Unknown => {
                diag.reason = "could not certify the sign of the qualifying rate".into();
                return Ok(diag);
            }
            _ => {}
        }
        match sign(&growth, &self.ctx) {
            Sign3::Known(Ordering::Less) => {
                diag.behavior = Behavior::Converges;
                diag.reason = format!("geometric ratio {ratio:.6} < 1");
            }
            Sign3::Known(Ordering::Greater) => {
                diag.behavior = Behavior::Diverges;
                diag.reason = format!("geometric ratio {ratio:.6} > 1");
            }
            Sign3::Known(Ordering::Equal) => match nu_plus_one.sign(&self.ctx) {
                Some(Ordering::Less) => {
                    diag.behavior = Behavior::Converges;
                    diag.reason = format!("ratio exactly 1, terms ≍ i^{log_power:.6} with exponent < -1");
                }
                Some(_) => {
                    diag.behavior = Behavior::Diverges;
                    diag.reason = format!("ratio exactly 1, terms ≍ i^{log_power:.6} with exponent >= -1");
                }
                None => diag.reason = "ratio exactly 1 but the p-series exponent is undecidable".into(),
            },
            Sign3::Unknown => diag.reason = "could not certify the sign of the growth exponent".into(),
        }
        Ok(diag)
    }

    /// For a rate tie with `β = 0`, `ψ_A(i) / shift(i)` is periodic in `i`;
    /// one period decides whether any index qualifies.
    fn periodic_qualifying(&self, shift: &Shift, slope: &Rational, offset: &Rational) -> Result<Qualifying> {
        let p = slope.numer().lcm(shift.alpha.denom());
        let Some(period) = p.to_u64().filter(|&p| p <= PERIOD_CAP) else {
            return Ok(Qualifying::Unknown);
        };
        let first = (slope + offset).floor().to_u64().unwrap_or(1);
        let start = first + period;
        for i in start..start + period {
            if self.psi.fiber(i)?.is_none() {
                continue;
            }
            let psi = self.psi.psi_a(i, self.t)?;
            if self.qualifies_exact(i, &psi) {
                return Ok(Qualifying::Periodic);
            }
        }
        Ok(Qualifying::Finite)
    }

    fn numeric(&self) -> Result<SeriesDiagnostics> {
        let partial_sums = self.partial_sums(NUMERIC_TERMS)?;
        let trend = match partial_sums.as_slice() {
            [.., a, b] => match (a.log10_sum, b.log10_sum) {
                (Some(x), Some(y)) if y - x < 1e-9 => "partial sums have stabilised",
                (Some(_), Some(_)) => "partial sums are still growing",
                _ => "too few qualifying terms to judge",
            },
            _ => "too few terms to judge",
        };
        Ok(SeriesDiagnostics {
            label: self.label.clone(),
            behavior: Behavior::Undetermined,
            decision_basis: DecisionBasis::NumericAdvisory,
            qualifying: Qualifying::Unknown,
            closed_form_ratio: None,
            log_power: None,
            partial_sums,
            reason: format!("tabulated input: {trend}; partial sums cannot prove convergence"),
        })
    }
}

/// Whether `ψ_A(i) >= t^-i / 2` for infinitely many `i`; `None` when this
/// cannot be decided (tables, uncertifiable ties).
pub fn large_psi_infinitely_often(psi: &PsiSpec, t: u64, ctx: &GammaCtx) -> Result<Option<bool>> {
    let (Some((theta, beta)), Some((slope, offset))) = (psi.rates(), psi.affine()) else {
        return Ok(None);
    };
    let base = psi.decay_base(t);
    let delta = LogExpr::ln(base, &theta / &slope).plus(&LogExpr::ln(t, -Rational::one()));
    Ok(match delta.sign(ctx) {
        Some(Ordering::Less) => Some(true),
        Some(Ordering::Greater) => Some(false),
        Some(Ordering::Equal) => match beta.signum() {
            Ordering::Greater => Some(false),
            Ordering::Less => Some(true),
            Ordering::Equal => {
                let Some(period) = slope.numer().to_u64().filter(|&p| p <= PERIOD_CAP) else {
                    return Ok(None);
                };
                let first = (&slope + &offset).floor().to_u64().unwrap_or(1);
                let start = first + period;
                let mut hit = false;
                for i in start..start + period {
                    if psi.fiber(i)?.is_none() {
                        continue;
                    }
                    let half = Rational::integer_pow(t, -(i as i64)) / Rational::from(2);
                    if psi.psi_a(i, t)?.cmp_rational(&half) != Ordering::Less {
                        hit = true;
                        break;
                    }
                }
                Some(hit)
            }
        },
        None => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::psi::{PsiFamily, SequenceSpec};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn series<'a>(psi: &'a PsiSpec, t: u64, s: &str, weight: LogExpr, shift: Option<Shift>, ctx: GammaCtx) -> Series<'a> {
        Series {
            label: "test".into(),
            psi,
            t,
            f: DimensionFunctionSpec::power(s.parse().unwrap()),
            weight,
            shift,
            ctx,
        }
    }

    #[test]
    fn shift_levels_round_exactly() {
        let s = Shift { m: 1, base: 12, alpha: r(2, 1), rounding: Rounding::Ceil };
        assert_eq!(s.level(3), 6);
        let s = Shift { m: 1, base: 12, alpha: r(1, 2), rounding: Rounding::Floor };
        assert_eq!(s.level(3), 1);
        let s = Shift { m: 1, base: 12, alpha: r(1, 2), rounding: Rounding::Ceil };
        assert_eq!(s.level(3), 2);
    }

    #[test]
    fn tie_at_gamma_diverges() {
        let ctx = GammaCtx { digits: 2, base: 3 };
        let psi = PsiSpec::power(r(1, 1), r(1, 1)).unwrap();
        let d = series(&psi, 3, "gamma", LogExpr::ln(2, r(1, 1)), None, ctx).analyze().unwrap();
        assert_eq!(d.behavior, Behavior::Diverges);
        assert!((d.closed_form_ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_modified_tie_uses_p_series() {
        let ctx = GammaCtx { digits: 2, base: 3 };
        // ψ(n) = 3^-n n^-β with s = γ: terms ≍ n^{-βγ}.
        for (beta, expect) in [(r(1, 1), Behavior::Diverges), (r(2, 1), Behavior::Converges)] {
            let psi = PsiSpec::new(
                PsiFamily::LogModified { theta: r(1, 1), beta: beta.clone(), base: None },
                SequenceSpec::Identity,
            )
            .unwrap();
            let d = series(&psi, 3, "gamma", LogExpr::ln(2, r(1, 1)), None, ctx).analyze().unwrap();
            // βγ > 1 iff β > 1/γ ≈ 1.585
            assert_eq!(d.behavior, expect, "beta={beta}");
        }
    }

    #[test]
    fn exact_shift_tie_is_empty() {
        let ctx = GammaCtx { digits: 2, base: 5 };
        let psi = PsiSpec::power(r(1, 4), r(1, 1)).unwrap();
        let shift = Shift { m: 1, base: 5, alpha: r(1, 1), rounding: Rounding::Ceil };
        let d = series(&psi, 5, "1/2", LogExpr::ln(2, r(1, 1)), Some(shift), ctx).analyze().unwrap();
        assert_eq!(d.qualifying, Qualifying::Finite);
        assert_eq!(d.behavior, Behavior::Converges);
        assert!(d.partial_sums.iter().all(|p| p.log10_sum.is_none()));
    }

    #[test]
    fn periodic_qualifying_set() {
        let ctx = GammaCtx { digits: 2, base: 5 };
        let psi = PsiSpec::power(r(1, 2), r(1, 1)).unwrap();
        let shift = Shift { m: 1, base: 5, alpha: r(1, 1), rounding: Rounding::Ceil };
        let d = series(&psi, 5, "1/2", LogExpr::ln(2, r(1, 1)), Some(shift), ctx).analyze().unwrap();
        assert_eq!(d.qualifying, Qualifying::Periodic);
        // terms ≍ 5^{-n/2} 2^n, ratio 2/√5 < 1
        assert_eq!(d.behavior, Behavior::Converges);
    }

    #[test]
    fn tables_are_advisory() {
        let ctx = GammaCtx { digits: 2, base: 3 };
        let values = (1..=50).map(|n| Rational::integer_pow(3, -n)).collect();
        let psi = PsiSpec::new(PsiFamily::Table { values }, SequenceSpec::Identity).unwrap();
        let d = series(&psi, 3, "1", LogExpr::ln(2, r(1, 1)), None, ctx).analyze().unwrap();
        assert_eq!(d.decision_basis, DecisionBasis::NumericAdvisory);
        assert_eq!(d.behavior, Behavior::Undetermined);
        assert_eq!(d.partial_sums.last().unwrap().terms, 50);
    }

    #[test]
    fn large_psi_detection() {
        let ctx = GammaCtx { digits: 2, base: 3 };
        let slow = PsiSpec::power(r(1, 1), r(1, 2)).unwrap();
        assert_eq!(large_psi_infinitely_often(&slow, 3, &ctx).unwrap(), Some(true));
        let fast = PsiSpec::power(r(1, 1), r(2, 1)).unwrap();
        assert_eq!(large_psi_infinitely_often(&fast, 3, &ctx).unwrap(), Some(false));
        let edge = PsiSpec::power(r(1, 2), r(1, 1)).unwrap();
        assert_eq!(large_psi_infinitely_often(&edge, 3, &ctx).unwrap(), Some(true));
        let below = PsiSpec::power(r(1, 3), r(1, 1)).unwrap();
        assert_eq!(large_psi_infinitely_often(&below, 3, &ctx).unwrap(), Some(false));
    }
}
