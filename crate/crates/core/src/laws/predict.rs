//! The exponent `λ_ψ = liminf -ln ψ(n) / (n ln t)` and dimension predictions.

use serde::{Deserialize, Serialize};

use super::exponent::GammaCtx;
use super::psi::{PsiFamily, PsiSpec};
use crate::cantor::CantorParams;
use crate::error::{Error, Result};
use crate::exactnum::{Rational, Real};
use crate::regime::{analyze, log_ratio_rational, Regime};

const PREC: u32 = 128;

/// Relative spread in the estimation window above which a table is flagged.
const OSCILLATION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case")]
pub enum LambdaBasis {
    ClosedForm,
    /// Estimated from the last half of a table.
    Window { start: u64, end: u64, oscillating: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub value: f64,
    /// Set when the value is rational and known exactly.
    pub exact: Option<Rational>,
    pub basis: LambdaBasis,
    /// `λ < 1`: every point is approximated and the dimension question is trivial.
    pub trivial: bool,
}

/// `λ_ψ` in base `t`.
///
/// For the families this is `θ ln(base) / ln t`; the `n^-β` factor does not
/// contribute. For tables the estimate is the smallest slope
/// `(ln ψ(h) - ln ψ(n)) / ((n - h) ln t)` with `h` the start of the last
/// half of the table and `n` ranging over that half, which removes the
/// bias a constant prefactor would add to `-ln ψ(n) / (n ln t)`.
pub fn lambda_psi(psi: &PsiSpec, t: u64) -> Result<LambdaEstimate> {
    psi.validate()?;
    if t < 2 {
        return Err(Error::Domain(format!("base t = {t} must be at least 2")));
    }
    let estimate = match &psi.family {
        PsiFamily::PowerDecay { theta, .. } | PsiFamily::LogModified { theta, .. } => {
            let base = psi.decay_base(t);
            let exact = log_ratio_rational(base, t).map(|q| theta * q);
            let value = match &exact {
                Some(q) => q.to_f64(),
                None => Real::log_ratio(base, t, PREC).mul_rational(theta).to_f64(),
            };
            LambdaEstimate {
                value,
                exact,
                basis: LambdaBasis::ClosedForm,
                trivial: false,
            }
        }
        PsiFamily::Table { values } => {
            let len = values.len() as u64;
            if len < 2 {
                return Err(Error::Domain("λ needs at least two tabulated values".into()));
            }
            let start = (len / 2).max(1);
            let ln_t = (t as f64).ln();
            let anchor = values[start as usize - 1].ln_f64();
            let slopes: Vec<f64> = (start + 1..=len)
                .map(|n| (anchor - values[n as usize - 1].ln_f64()) / ((n - start) as f64 * ln_t))
                .collect();
            let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let scale = lo.abs().max(hi.abs());
            let oscillating = scale > 0.0 && (hi - lo) > OSCILLATION_TOLERANCE * scale;
            LambdaEstimate {
                value: lo,
                exact: None,
                basis: LambdaBasis::Window { start, end: len, oscillating },
                trivial: false,
            }
        }
    };
    Ok(LambdaEstimate {
        trivial: estimate.value < 1.0,
        ..estimate
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grade {
    Theorem,
    Conjecture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictedValue {
    Point { value: f64 },
    Interval { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionEntry {
    pub quantity: String,
    pub value: PredictedValue,
    pub grade: Grade,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub regime: Regime,
    pub gamma: f64,
    pub lambda: f64,
    pub entries: Vec<PredictionEntry>,
    pub notes: Vec<String>,
}

impl Prediction {
    /// The first entry of the given grade.
    pub fn entry(&self, grade: Grade) -> Option<&PredictionEntry> {
        self.entries.iter().find(|e| e.grade == grade)
    }
}

/// Dimension of `W_t(ψ) ∩ C(b, D)` for `λ_ψ = lambda`, by regime.
///
/// With `theta` given (meaning `ψ(n) = t^-θn`) a large-intersection
/// threshold is added in the dependent regime.
pub fn predict_dimension(params: &CantorParams, t: u64, lambda: f64, theta: Option<&Rational>) -> Result<Prediction> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(Error::Domain(format!(
            "λ = {lambda} < 1: the situation is trivial, every point is approximated"
        )));
    }
    let b = params.base() as u64;
    let report = analyze(b, t)?;
    let gamma_real = GammaCtx::of(params).gamma(PREC);
    let gamma = gamma_real.to_f64();
    let point = gamma / lambda;
    let boundary = params.touches_boundary();
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    let hypothesis_note = || {
        format!("{params}: D contains neither 0 nor b-1, so no theorem-grade value is available")
    };
    match report.regime {
        Regime::MultiplicativelyDependent => {
            if boundary {
                entries.push(PredictionEntry {
                    quantity: "dim_H = γ/λ".into(),
                    value: PredictedValue::Point { value: point },
                    grade: Grade::Theorem,
                });
                let alpha = report.alpha1.clone().expect("dependent");
                let scale = alpha.to_f64() * Real::log_ratio(b, t, PREC).to_f64();
                entries.push(PredictionEntry {
                    quantity: "bounds α (log b/log t) γ/λ".into(),
                    value: PredictedValue::Interval {
                        lower: scale * point,
                        upper: scale * point,
                    },
                    grade: Grade::Theorem,
                });
            } else {
                notes.push(hypothesis_note());
            }
            if let Some(theta) = theta {
                if boundary {
                    entries.push(PredictionEntry {
                        quantity: format!("large intersection for s < γ/θ (θ = {theta})"),
                        value: PredictedValue::Point {
                            value: gamma / theta.to_f64(),
                        },
                        grade: Grade::Theorem,
                    });
                }
            }
        }
        Regime::SamePrimesIndependent => {
            if boundary {
                let ratio = Real::log_ratio(b, t, PREC);
                let a1 = report.alpha1.clone().expect("same primes");
                let a2 = report.alpha2.clone().expect("same primes");
                let lower = ratio.mul_rational(&a1).to_f64() * point;
                let upper = ratio.mul_rational(&a2).to_f64() * point;
                entries.push(PredictionEntry {
                    quantity: "α₁ (log b/log t) γ/λ <= dim_H <= α₂ (log b/log t) γ/λ".into(),
                    value: PredictedValue::Interval { lower, upper },
                    grade: Grade::Theorem,
                });
            } else {
                notes.push(hypothesis_note());
            }
            entries.push(PredictionEntry {
                quantity: "dim_H = γ/λ".into(),
                value: PredictedValue::Point { value: point },
                grade: Grade::Conjecture,
            });
        }
        Regime::DifferentPrimes => {
            if !boundary {
                notes.push(format!("{params}: D contains neither 0 nor b-1; the conjecture is stated only for such D"));
            }
            entries.push(PredictionEntry {
                quantity: "dim_H = max{1/λ + γ - 1, 0}".into(),
                value: PredictedValue::Point {
                    value: (1.0 / lambda + gamma - 1.0).max(0.0),
                },
                grade: Grade::Conjecture,
            });
        }
    }
    Ok(Prediction {
        regime: report.regime,
        gamma,
        lambda,
        entries,
        notes,
    })
}

/// Heuristic growth exponent `1 - θ(1 - γ)` of the number of balls
/// `B(p/t^n, t^-θn)` meeting `C(b, D)` in the different-primes regime,
/// expressed per factor `t^n`.
pub fn heuristic_count_exponent(params: &CantorParams, theta: &Rational) -> f64 {
    let gamma = GammaCtx::of(params).gamma_f64();
    1.0 - theta.to_f64() * (1.0 - gamma)
}
