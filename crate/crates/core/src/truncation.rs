use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Sort order applied to a vertex's edges before truncating them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TruncationOrder {
    TimestampAscending,
    #[default]
    TimestampDescending,
    AmountAscending,
    AmountDescending,
}

impl TruncationOrder {
    pub const ALL: [TruncationOrder; 4] = [
        TruncationOrder::TimestampAscending,
        TruncationOrder::TimestampDescending,
        TruncationOrder::AmountAscending,
        TruncationOrder::AmountDescending,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TruncationOrder::TimestampAscending => "TIMESTAMP_ASCENDING",
            TruncationOrder::TimestampDescending => "TIMESTAMP_DESCENDING",
            TruncationOrder::AmountAscending => "AMOUNT_ASCENDING",
            TruncationOrder::AmountDescending => "AMOUNT_DESCENDING",
        }
    }
}

impl fmt::Display for TruncationOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TruncationOrder {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        TruncationOrder::ALL
            .into_iter()
            .find(|o| o.as_str() == s.trim())
            .ok_or_else(|| CoreError::TruncationOrder(s.to_owned()))
    }
}

/// Per-hop cap on traversed edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub limit: u32,
    pub order: TruncationOrder,
}

impl TruncationSpec {
    pub fn new(limit: u32, order: TruncationOrder) -> Result<Self> {
        if limit == 0 {
            return Err(CoreError::TruncationLimit);
        }
        Ok(TruncationSpec { limit, order })
    }

    /// Limit `limit` with the default `TIMESTAMP_DESCENDING` order.
    pub fn with_limit(limit: u32) -> Result<Self> {
        TruncationSpec::new(limit, TruncationOrder::default())
    }

    /// A limit high enough to never truncate anything.
    pub const fn unlimited() -> Self {
        TruncationSpec {
            limit: u32::MAX,
            order: TruncationOrder::TimestampDescending,
        }
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            limit: 100,
            order: TruncationOrder::TimestampDescending,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_parsing() {
        assert_eq!(
            TruncationOrder::default(),
            TruncationOrder::TimestampDescending
        );
        assert!(TruncationSpec::new(0, TruncationOrder::AmountAscending).is_err());
        for o in TruncationOrder::ALL {
            assert_eq!(o.as_str().parse::<TruncationOrder>().unwrap(), o);
        }
        assert!("SIDEWAYS".parse::<TruncationOrder>().is_err());
    }
}
