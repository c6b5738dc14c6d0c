use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("malformed row {row} in {}: {reason}", .path.display())]
    MalformedRow {
        path: PathBuf,
        row: u64,
        reason: String,
    },

    #[error("table has no data rows: {}", .0.display())]
    EmptyTable(PathBuf),

    #[error("unknown table: {0}")]
    UnknownTable(String),

    #[error("unknown column: {0}")]
    UnknownColumn(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("unsupported index format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("corrupt index file: {0}")]
    CorruptFile(String),

    #[error("no index has been built or loaded")]
    IndexNotBuilt,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid testbed spec: {0}")]
    InvalidSpec(String),

    #[error("no columns could be indexed: {0}")]
    NothingIndexed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
