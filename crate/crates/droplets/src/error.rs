//! Error types shared across the library.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid input: precondition violated before any computation ran.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver failed to converge; carries the best residual seen.
    #[error("numeric error in {context}: residual {residual:.3e}")]
    Numeric { context: String, residual: f64 },

    /// A quadrature or series evaluation could not reach the requested tolerance.
    #[error("accuracy error in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy {
        context: String,
        achieved: f64,
        requested: f64,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(context: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            context: context.into(),
            residual,
        }
    }

    /// True for input-validation failures (as opposed to numeric breakdowns).
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
