use thiserror::Error;

use crate::schema::{EdgeKind, VertexKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("{kind:?} {id} already exists")]
    DuplicateVertex { kind: VertexKind, id: u64 },
    #[error("{kind:?} {id} not found")]
    VertexNotFound { kind: VertexKind, id: u64 },
    #[error("{kind:?} edge {edge_id} not found")]
    EdgeNotFound { kind: EdgeKind, edge_id: u64 },
    #[error("{kind:?} edge cannot connect {src:?} to {dst:?}")]
    EndpointKind {
        kind: EdgeKind,
        src: VertexKind,
        dst: VertexKind,
    },
    #[error("{kind:?} edge {src}->{dst} already exists")]
    Multiplicity { kind: EdgeKind, src: u64, dst: u64 },
    #[error("{0}")]
    Cardinality(String),
    #[error("{kind:?} {id} lacks mandatory attribute {attr}")]
    MissingAttribute {
        kind: VertexKind,
        id: u64,
        attr: &'static str,
    },
    #[error("attribute {attr} has the wrong type")]
    AttributeType { attr: String },
    #[error("serialization conflict in txn {0}")]
    SerializationConflict(u64),
    #[error("lock wait timed out in txn {0}")]
    LockTimeout(u64),
    #[error("transaction {0} is no longer active")]
    NotActive(u64),
    #[error("engine has crashed")]
    Crashed,
    #[error("{0}")]
    Busy(String),
    #[error("wal io: {0}")]
    Io(String),
    #[error("corrupt log after sequence {last_valid_seq}: {reason}")]
    Recovery { last_valid_seq: u64, reason: String },
}

impl EngineError {
    /// Errors that mean "retry the whole transaction".
    pub fn is_conflict(&self) -> bool {
        matches!(
            self,
            EngineError::SerializationConflict(_) | EngineError::LockTimeout(_)
        )
    }
}

impl From<std::io::Error> for EngineError {
    fn from(e: std::io::Error) -> Self {
        EngineError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EngineError>;
