use std::path::PathBuf;

use crate::lp::LpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed grid: {0}")]
    MalformedInput(String),

    #[error("invalid digit {0}, expected 0..=9")]
    InvalidDigit(u8),

    #[error("puzzle violates the Sudoku rules")]
    ConflictedPuzzle,

    #[error("grid has blank cells")]
    IncompleteGrid,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid bounds for variable {index}: [{lower}, {upper}]")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("linear program not solved to optimality: {0:?}")]
    LpFailed(LpStatus),

    #[error("dataset file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("{}:{line}: {reason}", path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
