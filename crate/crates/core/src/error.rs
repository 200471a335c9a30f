use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported form kind: {0}")]
    UnsupportedKind(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("trichotomy violated: {0}")]
    Trichotomy(String),
    #[error("charts do not cover: {0}")]
    ChartsDoNotCover(String),
    #[error("indeterminate at tolerance: {0}")]
    IndeterminateAtTolerance(String),
    #[error("not a characteristic foliation: {0}")]
    NotACharacteristicFoliation(String),
    #[error("not transverse: {0}")]
    NotTransverse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("work budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
