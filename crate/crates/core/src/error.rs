use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("unsafe clause `{0}`: variable occurs only under negation or in the head")]
    UnsafeClause(String),

    #[error("literal `{0}` matches no mode declaration")]
    NoMatchingMode(String),

    #[error("No Solution: {0}")]
    NoSolution(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoSolution(_) => 3,
            Error::ResourceCap(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
