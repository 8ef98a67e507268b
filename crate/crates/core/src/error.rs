use thiserror::Error;

/// Errors raised by the evaluators, the solver and the verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("{func}: domain error: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Structurally invalid input (bad grid, wrong number of initial values, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The evaluation itself failed (zero denominator, overflow, iteration budget).
    #[error("{func}: evaluation failed: {detail}")]
    Evaluation { func: &'static str, detail: String },

    /// The requested operation is not implemented for these arguments.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}

pub(crate) fn evaluation(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Evaluation {
        func,
        detail: detail.into(),
    }
}
