use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or iteration failed to reach the requested tolerance.
    #[error("accuracy error: {what} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Accuracy {
        what: String,
        achieved: f64,
        requested: f64,
    },

    /// The function does not belong to the weighted tail class, so the
    /// fractional Laplacian is not defined pointwise.
    #[error("tail divergence: {0}")]
    TailDivergence(String),

    /// A linear solve failed.
    #[error("numerical error: {message} (smallest eigenvalue estimate {min_eigenvalue:.3e})")]
    Numerical {
        message: String,
        min_eigenvalue: f64,
    },

    /// Invalid input data (non-finite samples, malformed files).
    #[error("input error: {0}")]
    Input(String),

    /// A barrier construction could not satisfy its inequalities.
    #[error("construction error: {message}\n{trace}")]
    Construction { message: String, trace: String },

    /// The mesh is too coarse to resolve the requested quantity.
    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
