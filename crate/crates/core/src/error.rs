use thiserror::Error;

use crate::quad::QuadResult;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined
    /// or where the underlying integral converges.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: value {:.17e} with error estimate {:.3e} after {} subdivisions", best.value, best.error_estimate, best.subdivisions_used)]
    NotConverged { best: QuadResult },

    /// An integrand or objective produced NaN or an infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Every optimizer restart ended without meeting the convergence test.
    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
