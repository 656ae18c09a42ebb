use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(String, String),
    #[error("dimension bound mismatch: {0:?} vs {1:?}")]
    DimMismatch(crate::shape::Dim, crate::shape::Dim),
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
    #[error("invalid presheaf map: {0}")]
    InvalidMap(String),
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("illegal parameters: {0}")]
    IllegalParameters(String),
    #[error("not a recognized generating inclusion: {0}")]
    UnknownInclusion(String),
    #[error("dimension bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("coskeletality certificate required: {0}")]
    MissingCertificate(String),
    #[error("coskeletality certificate rejected: {0}")]
    BadCertificate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
