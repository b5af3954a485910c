use thiserror::Error;

/// Errors raised by every engine in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured enumeration or counting cap would be exceeded.
    #[error("resource limit `{cap}` exceeded: needed {needed}, limit {limit}")]
    Resource {
        cap: &'static str,
        needed: String,
        limit: String,
    },

    /// A hypothesis of the requested operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The ball is too large for the endpoint classifier (radius >= b^-n / 2).
    #[error("not applicable: radius {radius} is not below b^-n/2 = {bound}")]
    NotApplicable { radius: String, bound: String },

    /// Invalid Cantor parameters; the message names the violated invariant.
    #[error("invalid Cantor parameters: {0}")]
    InvalidParams(String),

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A least-squares fit had too little usable data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
