use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: column index {col} out of bounds for {n_cols} columns")]
    IndexOutOfBounds { row: usize, col: i64, n_cols: usize },

    #[error("row {row}: negative offset {offset} in indptr")]
    NegativeOffset { row: usize, offset: i64 },

    #[error("row {row}: indptr is not monotonic ({start} > {end})")]
    NonMonotonicIndptr { row: usize, start: i64, end: i64 },

    #[error("inconsistent array lengths: {0}")]
    LengthMismatch(String),

    #[error("dimension mismatch: {left} columns vs {right} columns")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("metric `{metric}` requires parameter `{param}`")]
    MissingParam { metric: &'static str, param: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("k = {k} exceeds the {available} available candidates")]
    KTooLarge { k: usize, available: usize },

    #[error("dense materialization of {rows}x{cols} exceeds the cap of {cap} elements")]
    SizeOverflow { rows: usize, cols: usize, cap: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported Matrix Market field `{0}`")]
    UnsupportedField(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::UnknownMetric(_)
            | Error::MissingParam { .. }
            | Error::InvalidParam(_)
            | Error::InvalidSpec(_)
            | Error::KTooLarge { .. } => 1,
            _ => 2,
        }
    }
}
