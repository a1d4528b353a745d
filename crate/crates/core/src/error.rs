//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the numerical kernels and the thermodynamic layers
/// built on top of them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A bracketing root finder was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative scheme hit its iteration cap before meeting its tolerance.
    #[error("{what} did not converge within {limit} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        limit: usize,
        residual: f64,
    },

    /// Inputs outside the mathematical or physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// No positive inverse temperature attains the requested generalized force.
    #[error("force {target:e} is unattainable for {context}")]
    InfeasibleForce { target: f64, context: String },

    /// A solved Brayton cycle failed to return to its anchor corner.
    #[error(
        "cycle closure residual {residual:e} exceeds {limit:e}: \
         stage-3 continuation does not recover the anchor temperature"
    )]
    NonClosure { residual: f64, limit: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
