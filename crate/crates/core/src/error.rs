use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The CLI maps [`Error::Verification`] to exit code 2 and every other
/// variant to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed input (configuration, expression, region description).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A property that should hold numerically did not.
    #[error("verification failure: {0}")]
    Verification(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    pub fn is_verification(&self) -> bool {
        matches!(self, Error::Verification(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
