use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {dim} exceeds the dense limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("level {requested} out of range, {available} levels available")]
    LevelOutOfRange { requested: usize, available: usize },

    #[error("insufficient data: need {needed} points, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("trajectory left [0, 1] at step {step} (t = {t}, y = {y})")]
    OutOfDomain { step: usize, t: f64, y: f64 },
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence(_) | Error::OutOfDomain { .. } | Error::InsufficientData { .. })
    }
}
