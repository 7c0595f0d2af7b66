use thiserror::Error;

/// Errors raised by the integration, sampling and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters are inconsistent (weights, dimensions, missing data).
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested enumeration exceeds its size budget.
    #[error("size error: {0}")]
    Size(String),

    /// The integrand returned a non-finite value.
    #[error("non-finite integrand value at node {node}{}", replicate.map(|r| format!(" (replicate {r})")).unwrap_or_default())]
    Evaluation { node: usize, replicate: Option<usize> },

    /// A numerical scheme failed to reach its requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Too few usable data points to fit a rate.
    #[error("insufficient data: {usable} usable rows, need at least 2")]
    InsufficientData { usable: usize },

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An internal invariant failed.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
