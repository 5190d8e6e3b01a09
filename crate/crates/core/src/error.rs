use thiserror::Error;

/// Errors raised by the core transforms, classifiers and statistics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix shape {rows}x{cols} does not match {len} stored values")]
    Shape { rows: usize, cols: usize, len: usize },

    #[error("feature {0} has no finite value to compute a fill statistic from")]
    AllMissingFeature(usize),

    #[error("k = {k} is out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("k = {k} exceeds the {n} available training samples")]
    KTooLarge { k: usize, n: usize },

    #[error("index {index} is out of range for {len} features")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("opposition variant requires a pivot point")]
    MissingPivot,

    #[error("opposition variant requires feature bounds")]
    MissingBounds,

    #[error("{n_samples} samples cannot fill {n_folds} folds")]
    TooFewSamples { n_samples: usize, n_folds: usize },

    #[error("empty input")]
    Empty,

    #[error("binary averaging needs exactly 2 classes, found {0}")]
    NotBinary(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
