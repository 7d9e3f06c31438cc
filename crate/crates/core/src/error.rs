//! Error type shared by all pipeline stages.

use thiserror::Error;

/// Errors produced by series construction, solving, evaluation and I/O.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A requested expansion order exceeds the available coefficients.
    #[error("order {requested} exceeds the {available} available coefficients")]
    OrderTooLarge { requested: usize, available: usize },

    /// An input value violates a structural invariant (non-finite
    /// coefficient, non-positive substitution power, empty series, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The solver could not reach the residual contract.
    /// `residual` is the largest achieved equation residual.
    #[error("solver failed to converge (max residual ~{residual:.3e})")]
    NonConvergence { residual: f64 },

    /// Evaluation was requested outside the physical domain of the
    /// approximant (negative factor base with non-integer exponent,
    /// pole, or an evaluation whose imaginary part is not negligible).
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// A quantity that must be real (large-variable amplitude or
    /// exponent, re-expanded coefficient) has a non-negligible
    /// imaginary part.
    #[error("result is not real: {0}")]
    NonRealResult(String),

    /// Percentage errors against a zero reference are undefined.
    #[error("reference value is zero; compare absolute differences instead")]
    ZeroReference,

    /// Malformed textual input (JSON series/approximant files, numbers).
    #[error("parse error: {0}")]
    Parse(String),

    /// A case name that is not in the built-in catalog.
    #[error("unknown case '{0}'")]
    UnknownCase(String),
}

pub type Result<T> = std::result::Result<T, Error>;
