use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated. The message names the
    /// offending argument and the constraint.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A map that must be a strict contraction is not one.
    #[error("map is not a strict contraction: lipschitz constant {0}")]
    NotContractive(f64),

    /// An operation needing map probabilities was given a system without them.
    #[error("system carries no probability vector")]
    MissingProbability,

    /// A map that must be invertible has a singular matrix.
    #[error("map matrix is singular, cannot take preimages")]
    CannotInvert,

    /// An input file could not be read or parsed.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// A JSON document did not match the expected schema.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand used all over the crate for precondition failures.
pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
