use thiserror::Error;

/// Errors raised by the numerics, simulation and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the documented domain of an operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The model parameters violate the long-memory / moment constraints
    /// (`nu > 1`, `0 < d < 1 - 1/alpha`, `c_a != 0`).
    #[error("model assumption violated: {0}")]
    Assumption(String),

    /// A quadrature, root search or other iterative routine did not converge,
    /// or an internal consistency check failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A configuration file could not be parsed or is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors caused by user input (bad parameters or config) rather
    /// than by a numerical breakdown or I/O.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Assumption(_) | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
