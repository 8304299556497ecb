use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    /// A parameter violates a construction invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The value cannot be represented as an `f64`; use the log variant.
    #[error("{function} overflows f64 for the given arguments; use the log variant")]
    Overflow { function: &'static str },

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// The Hankel-transform density oracle failed to converge.
    #[error("density oracle failed at r = {r}: {detail}")]
    Oracle { r: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
