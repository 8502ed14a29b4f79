//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by mesh, solver, estimator, and driver operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent sizes, bad parameter values, malformed input.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Adaptation function violates strict positivity.
    #[error("invalid adaptation function: {0}")]
    InvalidAdaptationFunction(String),

    /// A non-finite value appeared where a finite one is required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Coefficients violate ellipticity or coercivity.
    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    /// Near-zero pivot in the tridiagonal elimination.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// Evaluation point outside [0, 1].
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// Operation needs data the problem does not provide (e.g. exact solution).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
