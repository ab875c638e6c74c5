use thiserror::Error;

/// Errors raised by the gait model, the controllers and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaitError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A physical bound such as the step-length limit was violated.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("invalid closed-loop poles: {0}")]
    InvalidPoles(String),

    #[error("step map is not controllable (det[B, AB] = {det:e})")]
    Uncontrollable { det: f64 },

    #[error("Riccati iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("invalid simulation configuration: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, GaitError>;

pub(crate) fn ensure_finite(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GaitError::InvalidArgument(format!("{name} must be finite")))
    }
}
