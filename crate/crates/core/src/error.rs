use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("parameters outside the mass-supercritical, energy-subcritical regime: {0}")]
    Regime(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("least-squares fit failed: {0}")]
    Fit(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("iteration diverged: {0}")]
    Divergence(String),
    #[error("domain truncation: {0}")]
    Truncation(String),
    #[error("table coverage: {0}")]
    Coverage(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
