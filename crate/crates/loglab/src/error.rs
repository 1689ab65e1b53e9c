use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lex error at {line}:{col}: {message}")]
    Lex { message: String, line: u32, col: u32 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("position {position} out of range (len {len})")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("mask count is zero for this method; instance skipped")]
    EmptyMaskSet,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing input artifact: {0}")]
    MissingArtifact(String),

    #[error("malformed record at {path}:{line}: {message}")]
    MalformedRecord { path: String, line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
