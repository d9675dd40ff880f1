//! The transaction workload: complex reads (TCR1-12), simple reads
//! (TSR1-6), writes (TW1-19) and read-writes (TRW1-3), all run against a
//! [`finbench_engine::Txn`].

mod error;
pub mod fixture;
mod op;
mod query;
pub mod read;
mod result;
mod rw;
mod write;

pub use error::{Result, WorkloadError};
pub use op::{OpResult, Operation};
pub use query::{exceeds, format_time, parse_time, Column, QueryKind, ReadParams, ReadQuery};
pub use result::*;
pub use rw::{rw_columns, ReadWrite, RwOutcome};
pub use write::{apply_write, write_columns, Write};
