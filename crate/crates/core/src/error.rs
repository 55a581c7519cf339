use thiserror::Error;

use crate::forest::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no edge between {0} and {1}")]
    NotAnEdge(VertexId, VertexId),
    #[error("cannot blow down: {0}")]
    CannotBlowDown(String),
    #[error("unknown check `{name}`; known checks: {registry}")]
    UnknownCheck { name: String, registry: String },
    #[error("state verification failed: {0}")]
    StateVerification(String),
    #[error("malformed state file: {0}")]
    MalformedState(String),
    #[error("bad filter expression: {0}")]
    BadFilter(String),
    #[error("frontier cap {cap} exceeded at depth {depth} ({size} states)")]
    FrontierCapExceeded { cap: usize, depth: usize, size: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
