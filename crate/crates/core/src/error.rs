use thiserror::Error;

use crate::model::{Face, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} is not in the ground set")]
    UnknownVertex(Vertex),
    #[error("face {0} is not a face of the complex")]
    NotAFace(Face),
    #[error("shape mismatch: expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("vectors live in different coordinate spaces")]
    SpaceMismatch,
    #[error("value is not integral")]
    NonIntegral,
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph has {vertices} vertices, above the limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
