use thiserror::Error;

/// Errors raised by the operator, quadrature and eigensolver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("test function `{label}` does not provide a {which} derivative")]
    MissingDerivative { label: String, which: &'static str },

    #[error("quadrature rule spans [{rule_lo}, {rule_hi}] but the operator lives on [{lo}, {hi}]")]
    IntervalMismatch {
        rule_lo: f64,
        rule_hi: f64,
        lo: f64,
        hi: f64,
    },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("determinant and shooting verdicts disagree: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
