use thiserror::Error;

use crate::boundary::Classification;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QopError {
    /// Shapes or grids do not line up (mismatched grids, too-coarse meshes, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// The caller handed in something outside the operation's contract.
    #[error("input error: {0}")]
    Input(String),

    /// An iterative kernel failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The request lies outside the analyzed catalog or the supported trace algebra.
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// A documented precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The operator is not self-adjoint, so no spectrum is emitted for it.
    #[error("refused: operator classified as {classification}; no spectrum for a non-observable")]
    Refused { classification: Classification },

    /// Scenario configuration could not be parsed or validated.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, QopError>;
