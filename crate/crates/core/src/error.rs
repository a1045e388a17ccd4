use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point that must lie in the relative interior of a simplex does not.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("numerical failure: {message} (residual {residual:e})")]
    Numerical {
        message: String,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A strategy-space trajectory left the interior of the state space.
    #[error("integration left the interior at t = {t}: {message}")]
    Integration { t: f64, message: String },

    /// A learning iterate stopped being a valid mixed strategy.
    #[error("simplex violation at iteration {iteration}: {message}")]
    SimplexViolation { iteration: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, residual: f64, last_iterate: Vec<f64>) -> Self {
        Error::Numerical {
            message: msg.into(),
            residual,
            last_iterate,
        }
    }
}
