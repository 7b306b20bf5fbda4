use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("wrong signal domain: expected {expected:?}, got {got:?}")]
    DomainError {
        expected: crate::signal::Domain,
        got: crate::signal::Domain,
    },

    #[error("signal has zero norm")]
    ZeroNorm,

    #[error("no convergence after {iterations} iterations (last change {last_change:e}, c = {c})")]
    Convergence {
        c: f64,
        iterations: usize,
        last_change: f64,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("grid truncation bound {bound:e} exceeds threshold {threshold:e}")]
    TailWarning { bound: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
