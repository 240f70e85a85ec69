use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("dangling reference: {kind} `{id}` does not resolve")]
    DanglingReference { kind: &'static str, id: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("conflicting labels for post `{post}` ({dimension}) by coder `{coder}`")]
    LabelConflict {
        post: String,
        dimension: String,
        coder: String,
    },
    #[error("dimension mismatch: expected {expected}, found {found} (record `{id}`)")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        id: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("missing dependency: {0}")]
    MissingDependency(String),
    #[error("did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 3,
            _ => 2,
        }
    }
}
