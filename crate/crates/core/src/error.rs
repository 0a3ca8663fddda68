//! Error type shared by all modules.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation point too close to a pole in variable {var}: distance {distance:.3e} < {threshold:.3e}")]
    PoleProximity {
        var: usize,
        distance: f64,
        threshold: f64,
    },

    #[error("root finding did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: u32,
        partial: Vec<Complex64>,
    },

    #[error("integral diverges: {reason}")]
    DivergentIntegral { reason: String },

    #[error("quadrature tolerance not met: value {value:.6e}, abs_error {abs_error:.3e}, target {target:.3e}")]
    ToleranceNotMet {
        value: f64,
        abs_error: f64,
        target: f64,
    },

    #[error("degenerate phase in variable {var}: |(-1)^m - e^(i*phi)| = {leading:.3e}")]
    DegeneratePhase { var: usize, leading: f64 },

    #[error("no grid phase met the norm bound: best ratio {best:.6e} > bound {bound:.6e}")]
    PhaseSearchFailed { best: f64, bound: f64 },

    #[error("least-squares system too ill-conditioned: cond {cond:.3e}")]
    IllConditionedFit { cond: f64 },

    #[error("pole locations not distinct in variable {var}: |{a} - {b}| = {separation:.3e}")]
    DistinctnessViolation {
        var: usize,
        a: f64,
        b: f64,
        separation: f64,
    },

    #[error("integrability screening failed: {reason}")]
    IntegrabilityViolation { reason: String },

    #[error("octant sign assignment does not cancel: sum of signs is {sum}")]
    SignsNotCancelling { sum: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl CoreError {
    /// Exit-status class used by the CLI: 2 for validation errors, 3 for
    /// numerical failures.
    pub fn exit_class(&self) -> i32 {
        match self {
            CoreError::DimensionMismatch { .. }
            | CoreError::InvalidInput(_)
            | CoreError::DistinctnessViolation { .. }
            | CoreError::IntegrabilityViolation { .. }
            | CoreError::SignsNotCancelling { .. }
            | CoreError::DegeneratePhase { .. } => 2,
            _ => 3,
        }
    }
}
