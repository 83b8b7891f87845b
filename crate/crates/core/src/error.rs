use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("not multilinear: {0}")]
    NotMultilinear(String),

    #[error("functional identity does not hold")]
    IdentityFails,

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
