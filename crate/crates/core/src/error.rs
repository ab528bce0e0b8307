use thiserror::Error;

/// Failure while decoding a serialized artifact.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("truncated input: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("backend id {found} does not match expected {expected}")]
    BackendMismatch { expected: u8, found: u8 },
    #[error("invalid group element encoding")]
    InvalidPoint,
    #[error("non-canonical scalar encoding")]
    InvalidScalar,
    #[error("invalid node path: {0}")]
    InvalidPath(String),
    #[error("entries are not in strictly increasing canonical order")]
    Unordered,
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("polynomial degree {degree} exceeds the setup bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("index {index} out of range for vector of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vector length {0} is not supported by this scheme")]
    UnsupportedLength(usize),
    #[error("index {0} appears more than once in the update batch")]
    DuplicateIndex(usize),
    #[error("update for index {0} does not match the currently committed message")]
    StaleMessage(usize),
    #[error("parameters do not cover {0}")]
    MissingParameters(String),
    #[error("proof does not belong to index {0}")]
    ProofMismatch(usize),
    #[error(transparent)]
    Format(#[from] FormatError),
}

pub type Result<T, E = VcError> = std::result::Result<T, E>;
