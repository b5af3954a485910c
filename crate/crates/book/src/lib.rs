//! The guide in `book/`, compiled so that its listings run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/cantor-sets.md")]
pub mod cantor_sets {}

#[doc = include_str!("../../../book/src/balls.md")]
pub mod balls {}

#[doc = include_str!("../../../book/src/regimes.md")]
pub mod regimes {}

#[doc = include_str!("../../../book/src/verdicts.md")]
pub mod verdicts {}

#[doc = include_str!("../../../book/src/predictions.md")]
pub mod predictions {}

#[doc = include_str!("../../../book/src/census.md")]
pub mod census {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
