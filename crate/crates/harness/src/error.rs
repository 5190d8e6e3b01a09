use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRows { line: u64, expected: usize, found: usize },
    #[error("line {line}, column {col}: cannot parse `{text}` as a number")]
    UnparseableCell { line: u64, col: usize, text: String },
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("label column: {0}")]
    LabelColumn(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] oblknn_core::Error),
}

impl HarnessError {
    /// Process exit status for a fatal error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
