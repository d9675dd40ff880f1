//! Transactional in-memory property multigraph used as the system under test.

mod engine;
mod error;
mod graph;
mod lock;
mod schema;
pub mod script;
pub mod wal;

pub use engine::{truncate_edges, DeleteSummary, Engine, EngineConfig, Fault, IsolationLevel, Txn};
pub use error::{EngineError, Result};
pub use graph::RedoOp;
pub use schema::{
    Direction, EdgeKind, EdgeRecord, Props, Value, VertexKind, VertexRecord, VertexRef,
};
pub use wal::RecoveryInfo;
