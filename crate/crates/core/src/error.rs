use thiserror::Error;

use crate::schwarz::ConvergenceHistory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("frequency band collapses: time step {time_step} must be smaller than twice the final time {final_time}")]
    BandCollapsed { final_time: f64, time_step: f64 },

    #[error("bisection did not converge within {iterations} iterations (last residual {residual})")]
    BisectionNotConverged { iterations: usize, residual: f64 },

    #[error("{what} at x = {x} is not a mesh node")]
    NotAMeshNode { what: &'static str, x: f64 },

    #[error("singular tridiagonal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("Schwarz iteration diverged after {} iterations", .history.iterations())]
    Diverged { history: Box<ConvergenceHistory> },

    #[error("Schwarz iteration did not reach tolerance {} within {} iterations (last error {:e})",
        .history.tolerance, .history.iterations(), .history.last_error().unwrap_or(f64::NAN))]
    NotConverged { history: Box<ConvergenceHistory> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

/// Checks that `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
