use thiserror::Error;

/// Errors shared across the numeric kernels.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:.3e}, target {target:.3e})")]
    NonConvergence { sweeps: usize, off: f64, target: f64 },

    #[error("eigenvalue {value:.6e} lies outside the function domain {domain} by more than the clamp tolerance")]
    DomainViolation { value: f64, domain: String },

    #[error("singular input where an invertible matrix is required (smallest eigenvalue {lambda_min:.3e})")]
    SingularInput { lambda_min: f64 },

    #[error("map must be unital for this operation (||E(I) - I|| = {deviation:.3e})")]
    NotUnital { deviation: f64 },

    #[error("iteration did not reach tolerance {target:.3e} within {iterations} steps (residual {residual:.3e})")]
    IterationLimit {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("optimizer restarts disagree beyond tolerance (relative gap {gap:.3e})")]
    OptimizerFailure { gap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
