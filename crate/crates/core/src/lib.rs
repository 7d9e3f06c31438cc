//! Extrapolation of truncated small-variable power series to their
//! large-variable power-law limit via self-similar factor approximants.
//!
//! The pipeline: [`log_derivatives`] turns a [`PowerSeries`] into the
//! moments of its series logarithm, [`solve_even`]/[`solve_odd`] solve
//! the parameter equations Σ n_j A_j^n = D_n for the factor parameters,
//! [`assemble`] builds the approximant A·x^α·Π(1 + A_j x^p)^{n_j}, and
//! [`asymptotic`] reads off its x → ∞ power law B·x^γ. [`extrapolate`]
//! runs the whole chain; [`builtin_cases`] provides benchmark series
//! with known limits and [`convergence_table`] reproduces their error
//! tables.
//!
//! All solver-path arithmetic is configurable-precision ([`Precision`],
//! default 80 decimal digits); results are deterministic at fixed
//! precision.

pub mod approximant;
pub mod cases;
pub mod complex;
pub mod error;
pub mod gamma;
pub mod io;
mod par;
pub mod precision;
pub mod series;
pub mod solver;

pub use approximant::{
    assemble, asymptotic, evaluate, evaluate_grid, evaluate_grid_seq, percentage_errors, reexpand,
    AsymptoticForm, ErrorReport, FactorApproximant,
};
pub use cases::{
    builtin_cases, convergence_table, convergence_table_seq, extrapolate, find_case,
    CaseDefinition, ConvergenceTable, RowOutcome, SolvedRow, TableRow,
};
pub use complex::Complex;
pub use error::{Error, Result};
pub use precision::{Precision, Real};
pub use series::{log_derivatives, rescale, LogDerivatives, PowerSeries};
pub use solver::{
    number_of_factors, residuals, solve_even, solve_odd, solve_odd_capped, Factor, FactorParameters,
};
