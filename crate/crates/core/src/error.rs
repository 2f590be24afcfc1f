//! Error type shared by every module, with the CLI exit code each variant maps to.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GgtError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("budget exceeded: {what} needs {actual}, limit is {limit}")]
    Budget {
        what: String,
        limit: usize,
        actual: usize,
    },

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("dangling reference: {0}")]
    DanglingRef(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl GgtError {
    pub fn usage(msg: impl Into<String>) -> Self {
        GgtError::Usage(msg.into())
    }

    pub fn budget(what: impl Into<String>, limit: usize, actual: usize) -> Self {
        GgtError::Budget {
            what: what.into(),
            limit,
            actual,
        }
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            GgtError::Usage(_) | GgtError::Io { .. } => 1,
            GgtError::Budget { .. } | GgtError::Indeterminate(_) => 2,
            GgtError::Parse { .. } => 4,
            GgtError::Schema(_) => 5,
            GgtError::DanglingRef(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, GgtError>;
