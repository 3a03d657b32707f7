use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} is invalid: {reason}")]
    InvalidShape {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |a[{row},{col}] - a[{col},{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("dense oracle limited to min dimension {cap}, got {size}")]
    OracleTooLarge { size: usize, cap: usize },

    #[error("filter of size {filter} does not fit input of size {input}")]
    FilterLargerThanInput { filter: usize, input: usize },

    #[error("stride {stride} >= filter size {k}: windows do not overlap")]
    NotOverlapping { k: usize, stride: usize },

    #[error("spectral norm of layer {layer} is zero")]
    ZeroSpectralNorm { layer: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("weight kind mismatch: {0}")]
    KindMismatch(String),
}
