use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("window starts before takeoff: cumulative count is 0 on day {day}")]
    WindowBeforeTakeoff { day: usize },

    #[error("insufficient exponential window: {found} removal events, need at least {needed}")]
    InsufficientWindow { found: usize, needed: usize },

    #[error("prior puts no mass on the grid")]
    DegeneratePrior,

    #[error("posterior grid is not normalized (integral = {integral})")]
    UnnormalizedGrid { integral: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// Process exit status for the CLI: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. }
            | Error::Quadrature(_)
            | Error::InsufficientWindow { .. }
            | Error::UnnormalizedGrid { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
