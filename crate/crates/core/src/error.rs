use thiserror::Error;

/// Crate-wide error type.
///
/// Numeric outcomes such as divergent integrals or infinite norms are *not*
/// errors; they are reported through status enums on the result types. The
/// variants here cover malformed input and violated preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent set: {0}")]
    InvalidExponents(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid quadrature request: {0}")]
    InvalidQuadrature(String),

    #[error("invalid norm request: {0}")]
    InvalidNorm(String),

    #[error("precondition failed: {}", .0.join("; "))]
    Precondition(Vec<String>),

    #[error("operator output diverges at radius {radius}")]
    DivergentOutput { radius: f64 },

    #[error("operator output unresolved at radius {radius}: {reason}")]
    UnresolvedOutput { radius: f64, reason: String },

    #[error("norm of {what} is not finite ({status})")]
    NonFiniteNorm { what: String, status: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
