//! Approximation functions, the zero-full series verdicts and dimension
//! predictions.

pub mod exponent;
pub mod predict;
pub mod psi;
pub mod series;
pub mod verdict;

pub use exponent::{GammaAffine, GammaCtx, LogExpr};
pub use psi::{DimensionFunctionSpec, Monotonicity, MonotonicityReport, PsiFamily, PsiSpec, SequenceSpec};
pub use series::{Behavior, DecisionBasis, PartialSum, Qualifying, SeriesDiagnostics};
pub use verdict::{conjecture_independent, verdict, verdict_base_equal, verdict_dependent, verdict_main, Law, Outcome, Verdict};
pub use predict::{heuristic_count_exponent, lambda_psi, predict_dimension, Grade, LambdaBasis, LambdaEstimate, PredictedValue, Prediction, PredictionEntry};
