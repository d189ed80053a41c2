use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("wrong sampling regime: {0}")]
    WrongRegime(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("complexity guard: {0}")]
    ComplexityGuard(String),

    #[error("time {t} outside [0, {horizon}]")]
    Domain { t: f64, horizon: f64 },

    #[error("log-domain error: {0}")]
    LogDomain(String),

    #[error("solver did not converge: {reason} (last accepted t = {t})")]
    NonConvergence { t: f64, reason: String },

    #[error("solution diverged (non-finite state) at t = {t}")]
    Divergence { t: f64 },

    #[error(
        "fixed-point iteration did not converge on [{start}, {end}] after {iterations} iterations \
         (contraction factor estimate {factor:.3e})"
    )]
    FixedPoint {
        start: f64,
        end: f64,
        iterations: usize,
        factor: f64,
    },

    #[error("degenerate reference: trajectory norm below 1e-12 at t = {t}")]
    DegenerateReference { t: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (solvers, logs of zero, degenerate
    /// references) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Divergence { .. }
                | Error::FixedPoint { .. }
                | Error::DegenerateReference { .. }
                | Error::LogDomain(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
