use thiserror::Error;

/// Broad classification used by the command-line front end for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    #[error("degenerate or separated data: {0}")]
    Degenerate(String),
    #[error("collinear coordinates: {}", .0.join(", "))]
    Collinear(Vec<String>),
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("{failed} of {total} replications failed (more than 5%); first failure: {first}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        first: String,
    },
    #[error("missing value for node {node:?} in column {column:?}")]
    MissingValue { node: String, column: String },
    #[error("parse error at line {line}, column {column:?}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },
    #[error("duplicate edge {source_id:?} -> {target_id:?} at line {line}")]
    DuplicateEdge {
        line: u64,
        source_id: String,
        target_id: String,
    },
    #[error("unknown node {id:?} at line {line} (not present in the features file)")]
    UnknownNode { line: u64, id: String },
    #[error("self-loop on node {id:?} at line {line}")]
    SelfLoop { line: u64, id: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NumericDomain(_)
            | Error::Degenerate(_)
            | Error::Collinear(_)
            | Error::NotConverged(_)
            | Error::TooManyFailures { .. } => ErrorKind::Numeric,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
