use thiserror::Error;

/// Crate-wide error type.
///
/// The variants split along the boundary the CLI cares about: bad inputs
/// (exit code 2) versus blown resource caps (exit code 3). Measurement
/// outcomes such as "no Folner set found" are not errors and never appear
/// here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),

    #[error("resource cap exceeded: {what} needs more than {cap}")]
    ResourceCap { what: String, cap: usize },

    #[error("eigensolver did not converge within {iterations} iterations (best Rayleigh bound {best})")]
    NoConvergence { iterations: usize, best: f64 },

    #[error("variation precondition violated at pair ({x}, {y}): measured {measured}, allowed {allowed}")]
    VariationViolation {
        x: usize,
        y: usize,
        measured: f64,
        allowed: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file {path}: {reason}")]
    Malformed { path: String, reason: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
