use thiserror::Error;

use crate::oracle::QuadratureResult;

/// Errors raised by the sinckit library.
#[derive(Debug, Clone, Error)]
pub enum SincError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("derivative order {requested} exceeds series order {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("even sinc power n = {n} needs a finite-part value")]
    MissingFinitePart { n: usize },

    #[error("lambda = {lambda} is not above the validity threshold {threshold}")]
    BelowThreshold { lambda: f64, threshold: f64 },

    /// The segment cap was reached; carries the best estimate obtained.
    #[error("quadrature did not converge after {} segments (error estimate {:e})", .0.segments_used, .0.error_estimate)]
    NotConverged(QuadratureResult),

    #[error("finite-part integral missed tolerance {tol:e} (estimate {estimate:e})")]
    ToleranceNotMet { tol: f64, estimate: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("argument {x} outside the series regime |x| <= {limit}")]
    OutOfRegime { x: f64, limit: f64 },

    #[error("series did not reach tolerance within {max_terms} terms")]
    SeriesNotConverged { max_terms: usize },
}

impl SincError {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SincError::NotConverged(_)
                | SincError::ToleranceNotMet { .. }
                | SincError::SeriesNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, SincError>;
