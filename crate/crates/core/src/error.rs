use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge (estimate {estimate}, error {error_estimate})")]
    NonConverged { estimate: f64, error_estimate: f64 },
    #[error("function is not differentiable at the requested point")]
    NotDifferentiable,
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),
    #[error("no singularity descriptor available: {0}")]
    UnknownSingularity(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("inner minimizer not found: {0}")]
    MinimizerNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::UnsupportedVariant(msg.into()))
}
