//! Exact arithmetic: rationals, digit expansions, exact power products and
//! certified real enclosures.

mod digits;
mod power;
mod rational;
mod real;

pub use digits::{digits_fixed, digits_fixed_u64, expand, preperiod_len, DigitExpansion};
pub use power::PowProduct;
pub use rational::Rational;
pub use real::{Real, DEFAULT_PRECISION};
