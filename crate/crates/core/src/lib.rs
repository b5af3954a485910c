//! Zero-full laws for well-approximable sets inside generalized Cantor sets.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: exact rationals, base-`b` digit expansions and certified
//!   real enclosures. Nothing in the geometry uses floating point.
//! * [`cantor`]: the generalized Cantor set `C(b, D)`, its construction
//!   levels, endpoint sets, membership and exact distance.
//! * [`ballgeom`]: rewriting a ball centred at `p / b^n` as recentred balls
//!   whose centres lie in `C(b, D)`, or proving the intersection empty.
//! * [`regime`]: prime factorizations, valuations and the `(b, t)` regime.
//! * [`laws`]: approximation functions, the series verdicts and dimension
//!   predictions.
//! * [`census`]: exact counting of the balls `B(p / t^n, r)` that meet
//!   `C(b, D)`, with a brute-force oracle and exponent fits.

pub mod ballgeom;
pub mod cantor;
pub mod census;
pub mod error;
pub mod exactnum;
pub mod laws;
pub mod regime;

pub use error::{Error, Result};
pub use exactnum::Rational;
