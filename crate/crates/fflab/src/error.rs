use std::fmt;

/// Everything that can go wrong in this crate.
///
/// The split matters for the CLI: `InvalidParameter` is a configuration
/// mistake (exit code 2), everything else is a numerical failure discovered
/// at run time (exit code 3).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range (e.g. `alpha <= -1`).
    InvalidParameter(String),
    /// An iteration failed to converge within its budget.
    NoConvergence(String),
    /// A quantity left the domain where the algorithm is meaningful
    /// (nodes collided, left the support interval, ...).
    Domain(String),
    /// A result would be garbage because of overflow/underflow or an
    /// integral that does not exist.
    Precision(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precision(msg) => write!(f, "precision loss: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True when the error is a configuration problem rather than a
    /// numerical one.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidParameter(_))
    }
}
