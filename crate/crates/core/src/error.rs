use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected `<u-label> <v-label>`, found {tokens} token(s)")]
    MalformedLine { line: usize, tokens: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("vertex index {index} out of range (side has {len} vertices)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("brute-force oracle refuses |V| = {v_count} (cap {cap})")]
    OracleCapExceeded { v_count: usize, cap: usize },

    #[error("observation count w must be positive")]
    ZeroObservations,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("row {row} is unlabeled")]
    UnlabeledVector { row: usize },

    #[error("gave up generating a non-empty graph after {attempts} attempts")]
    GenerationFailed { attempts: u32 },

    #[error("csv: {0}")]
    Csv(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
