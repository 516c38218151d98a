//! Error type shared by builders, the integrator, and the oracle.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested step violates the fixed-step stability guard
    /// `dt * max_frequency < 0.5`.
    #[error("time step {dt} is unstable for the model's top frequency; use dt <= {suggested:.4e}")]
    Stability { dt: f64, suggested: f64 },

    /// Norm drift exceeded the hard failure threshold during integration,
    /// which signals a misconfigured time step.
    #[error("integration failure: norm drifted by {drift:.3e} at t = {t:.3}")]
    NormDrift { drift: f64, t: f64 },

    /// Two routes to the same quantity disagree beyond tolerance
    /// (discretization too coarse for the requested physics).
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    /// The dense oracle refuses instances above its dimension guard.
    #[error("dense oracle refused: dimension {dim} exceeds the guard of {max}")]
    DimensionGuard { dim: usize, max: usize },

    /// Dense eigendecomposition failed.
    #[error("oracle error: {0}")]
    Oracle(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
