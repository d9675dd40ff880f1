use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::id::EntityId;

/// A transfer trace as an ordered list of account ids.
///
/// Edge identities are not part of a path: several parallel edges between the
/// same ordered pair of vertices produce one and the same path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<EntityId>);

impl Path {
    pub fn new(ids: Vec<EntityId>) -> Result<Path> {
        if ids.len() < 2 {
            return Err(CoreError::ShortPath);
        }
        Ok(Path(ids))
    }

    pub fn from_u64s(ids: &[u64]) -> Result<Path> {
        Path::new(ids.iter().copied().map(EntityId).collect())
    }

    pub fn vertices(&self) -> &[EntityId] {
        &self.0
    }

    /// Number of vertices on the path.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Deduplicates and orders paths: longest first, then by id sequence.
pub fn canonicalize_paths(mut paths: Vec<Path>) -> Vec<Path> {
    paths.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.0.cmp(&b.0)));
    paths.dedup();
    paths
}
