use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    /// A bad line in a corpus or list file; `line` is 1-based.
    #[error("{}:{line}: {reason}", path.display())]
    Record { path: PathBuf, line: usize, reason: String },

    #[error("{}: empty gazetteer", path.display())]
    EmptyGazetteer { path: PathBuf },

    #[error("{}: corrupt model file: {reason}", path.display())]
    CorruptModel { path: PathBuf, reason: String },

    #[error("{}: unsupported {what} version {found} (expected {expected})", path.display())]
    VersionMismatch { path: PathBuf, what: &'static str, found: u64, expected: u64 },

    #[error("request failed: {0}")]
    Transport(String),

    #[error("HTTP status {status}: {body}")]
    Status { status: u16, body: String },

    #[error("unparseable response: {0}")]
    Response(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] addrtag_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
