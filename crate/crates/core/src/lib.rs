//! Domain types shared by every FinBench crate.
//!
//! Everything here is an immutable value type: identifiers, millisecond
//! timestamps, two-decimal money, three-decimal rounded results, transfer
//! paths and truncation specs.

mod error;
mod id;
mod money;
mod path;
mod round;
mod time;
mod truncation;

pub use error::{CoreError, Result};
pub use id::EntityId;
pub use money::Money;
pub use path::{canonicalize_paths, Path};
pub use round::{round3, Rounded3};
pub use time::{Date, Timestamp, Window};
pub use truncation::{TruncationOrder, TruncationSpec};
