//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A problem triple or grid description violates a structural constraint.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Input data (nodal values, exponents, radii) outside the admissible set.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A quantity the caller supplied lies outside the formula's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two internal routes that must agree disagreed beyond tolerance.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    /// An iterative routine ran out of its iteration budget.
    #[error("failed to converge: {0}")]
    Unconverged(String),

    /// The shooting bracket does not separate undershoot from overshoot.
    /// Carries the boundary diagnostics of both trial integrations.
    #[error(
        "invalid shooting bracket [{lo}, {hi}]: v_lo(1) = {lo_end:?} (crossing {lo_crossing:?}), \
         v_hi(1) = {hi_end:?} (crossing {hi_crossing:?})"
    )]
    InvalidBracket {
        lo: f64,
        hi: f64,
        lo_end: f64,
        lo_crossing: Option<f64>,
        hi_end: f64,
        hi_crossing: Option<f64>,
    },

    /// A cumulative integral vanished where the integrand does not.
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),
}
