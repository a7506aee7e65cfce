//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by state construction, propagation, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix fails the covariance-matrix invariants (symmetry, finiteness,
    /// positive diagonal, positive definiteness where required).
    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    /// A numerical routine produced results outside its validated regime
    /// (complex eigenvalues beyond tolerance, negative discriminants, ...).
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The requested parameter combination is outside the supported set.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// The initial-state widths collapse the Gaussian quadratic form.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A run configuration failed validation; `field` names the offender.
    #[error("config error in field `{field}`: {message}")]
    ConfigError { field: String, message: String },

    /// Fixed-step moment integration left the finite range.
    #[error("integration diverged at t = {t}")]
    IntegrationDiverged { t: f64 },

    /// Filesystem trouble while writing run output.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
