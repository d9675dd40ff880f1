//! Read query kinds and their parameters.

use std::fmt;
use std::str::FromStr;

use finbench_core::{Money, Rounded3, Timestamp, TruncationOrder, TruncationSpec, Window};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WorkloadError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QueryKind {
    Tcr1,
    Tcr2,
    Tcr3,
    Tcr4,
    Tcr5,
    Tcr6,
    Tcr7,
    Tcr8,
    Tcr9,
    Tcr10,
    Tcr11,
    Tcr12,
    Tsr1,
    Tsr2,
    Tsr3,
    Tsr4,
    Tsr5,
    Tsr6,
}

/// A parameter column as named in the query cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Id,
    Id1,
    Id2,
    Pid1,
    Pid2,
    StartTime,
    EndTime,
    TruncationLimit,
    TruncationOrder,
    Threshold,
    Threshold1,
    Threshold2,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Id => "id",
            Column::Id1 => "id1",
            Column::Id2 => "id2",
            Column::Pid1 => "pid1",
            Column::Pid2 => "pid2",
            Column::StartTime => "startTime",
            Column::EndTime => "endTime",
            Column::TruncationLimit => "truncationLimit",
            Column::TruncationOrder => "truncationOrder",
            Column::Threshold => "threshold",
            Column::Threshold1 => "threshold1",
            Column::Threshold2 => "threshold2",
        }
    }
}

impl QueryKind {
    pub const ALL: [QueryKind; 18] = [
        QueryKind::Tcr1,
        QueryKind::Tcr2,
        QueryKind::Tcr3,
        QueryKind::Tcr4,
        QueryKind::Tcr5,
        QueryKind::Tcr6,
        QueryKind::Tcr7,
        QueryKind::Tcr8,
        QueryKind::Tcr9,
        QueryKind::Tcr10,
        QueryKind::Tcr11,
        QueryKind::Tcr12,
        QueryKind::Tsr1,
        QueryKind::Tsr2,
        QueryKind::Tsr3,
        QueryKind::Tsr4,
        QueryKind::Tsr5,
        QueryKind::Tsr6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Tcr1 => "TCR1",
            QueryKind::Tcr2 => "TCR2",
            QueryKind::Tcr3 => "TCR3",
            QueryKind::Tcr4 => "TCR4",
            QueryKind::Tcr5 => "TCR5",
            QueryKind::Tcr6 => "TCR6",
            QueryKind::Tcr7 => "TCR7",
            QueryKind::Tcr8 => "TCR8",
            QueryKind::Tcr9 => "TCR9",
            QueryKind::Tcr10 => "TCR10",
            QueryKind::Tcr11 => "TCR11",
            QueryKind::Tcr12 => "TCR12",
            QueryKind::Tsr1 => "TSR1",
            QueryKind::Tsr2 => "TSR2",
            QueryKind::Tsr3 => "TSR3",
            QueryKind::Tsr4 => "TSR4",
            QueryKind::Tsr5 => "TSR5",
            QueryKind::Tsr6 => "TSR6",
        }
    }

    pub fn is_complex(self) -> bool {
        self < QueryKind::Tsr1
    }

    pub fn columns(self) -> &'static [Column] {
        use Column::*;
        const WINDOW_TRUNC: &[Column] = &[Id, StartTime, EndTime, TruncationLimit, TruncationOrder];
        const PAIR: &[Column] = &[Id1, Id2, StartTime, EndTime];
        const TH_TRUNC: &[Column] = &[
            Id,
            Threshold,
            StartTime,
            EndTime,
            TruncationLimit,
            TruncationOrder,
        ];
        const TH: &[Column] = &[Id, Threshold, StartTime, EndTime];
        match self {
            QueryKind::Tcr1 | QueryKind::Tcr2 | QueryKind::Tcr5 => WINDOW_TRUNC,
            QueryKind::Tcr11 | QueryKind::Tcr12 => WINDOW_TRUNC,
            QueryKind::Tcr3 | QueryKind::Tcr4 => PAIR,
            QueryKind::Tcr6 => &[
                Id,
                Threshold1,
                Threshold2,
                StartTime,
                EndTime,
                TruncationLimit,
                TruncationOrder,
            ],
            QueryKind::Tcr7 | QueryKind::Tcr8 | QueryKind::Tcr9 => TH_TRUNC,
            QueryKind::Tcr10 => &[Pid1, Pid2, StartTime, EndTime],
            QueryKind::Tsr1 => &[Id],
            QueryKind::Tsr2 | QueryKind::Tsr6 => &[Id, StartTime, EndTime],
            QueryKind::Tsr3 | QueryKind::Tsr4 | QueryKind::Tsr5 => TH,
        }
    }

    pub fn header(self) -> String {
        self.columns()
            .iter()
            .map(|c| c.name())
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = WorkloadError;
    fn from_str(s: &str) -> Result<Self> {
        QueryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| WorkloadError::Params(format!("unknown query kind {s:?}")))
    }
}

/// Every parameter any read query takes. Each kind uses the subset listed by
/// [`QueryKind::columns`]; the rest keep their defaults.
///
/// `id2` holds the second vertex of TCR3, TCR4 and TCR10. Thresholds are kept
/// to three decimals so that TCR8's multiplier is exact too.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReadParams {
    pub id: u64,
    pub id2: u64,
    pub window: Window,
    pub threshold: Rounded3,
    pub threshold2: Rounded3,
    pub trunc: TruncationSpec,
}

impl Default for ReadParams {
    fn default() -> Self {
        ReadParams {
            id: 0,
            id2: 0,
            window: Window::unbounded(),
            threshold: Rounded3::ZERO,
            threshold2: Rounded3::ZERO,
            trunc: TruncationSpec {
                limit: 100,
                order: TruncationOrder::TimestampDescending,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReadQuery {
    pub kind: QueryKind,
    pub params: ReadParams,
}

/// Timestamps in parameter files are either the 28-character datetime text
/// or raw epoch milliseconds.
pub fn parse_time(s: &str) -> Result<Timestamp> {
    let t = s.trim();
    if let Ok(ms) = t.parse::<i64>() {
        return Ok(Timestamp(ms));
    }
    Ok(Timestamp::parse(t)?)
}

pub fn format_time(t: Timestamp) -> String {
    t.format().unwrap_or_else(|_| t.0.to_string())
}

fn parse_id(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| WorkloadError::Params(format!("bad id {s:?}")))
}

impl ReadQuery {
    pub fn new(kind: QueryKind, params: ReadParams) -> Self {
        ReadQuery { kind, params }
    }

    /// Values in [`QueryKind::columns`] order.
    pub fn values(&self) -> Vec<String> {
        let p = &self.params;
        self.kind
            .columns()
            .iter()
            .map(|c| match c {
                Column::Id | Column::Id1 | Column::Pid1 => p.id.to_string(),
                Column::Id2 | Column::Pid2 => p.id2.to_string(),
                Column::StartTime => format_time(p.window.start),
                Column::EndTime => format_time(p.window.end),
                Column::TruncationLimit => p.trunc.limit.to_string(),
                Column::TruncationOrder => p.trunc.order.to_string(),
                Column::Threshold | Column::Threshold1 => p.threshold.to_string(),
                Column::Threshold2 => p.threshold2.to_string(),
            })
            .collect()
    }

    pub fn to_line(&self) -> String {
        self.values().join("|")
    }

    /// Same query with every field outside [`QueryKind::columns`] reset.
    pub fn canonical(&self) -> ReadQuery {
        let (p, mut q) = (&self.params, ReadParams::default());
        for c in self.kind.columns() {
            match c {
                Column::Id | Column::Id1 | Column::Pid1 => q.id = p.id,
                Column::Id2 | Column::Pid2 => q.id2 = p.id2,
                Column::StartTime => q.window.start = p.window.start,
                Column::EndTime => q.window.end = p.window.end,
                Column::TruncationLimit => q.trunc.limit = p.trunc.limit,
                Column::TruncationOrder => q.trunc.order = p.trunc.order,
                Column::Threshold | Column::Threshold1 => q.threshold = p.threshold,
                Column::Threshold2 => q.threshold2 = p.threshold2,
            }
        }
        ReadQuery::new(self.kind, q)
    }

    pub fn parse_fields(kind: QueryKind, fields: &[&str]) -> Result<ReadQuery> {
        let cols = kind.columns();
        if fields.len() != cols.len() {
            return Err(WorkloadError::Params(format!(
                "{kind} expects {} fields, got {}",
                cols.len(),
                fields.len()
            )));
        }
        let mut p = ReadParams::default();
        let mut limit = p.trunc.limit;
        let mut order = p.trunc.order;
        for (c, f) in cols.iter().zip(fields) {
            match c {
                Column::Id | Column::Id1 | Column::Pid1 => p.id = parse_id(f)?,
                Column::Id2 | Column::Pid2 => p.id2 = parse_id(f)?,
                Column::StartTime => p.window.start = parse_time(f)?,
                Column::EndTime => p.window.end = parse_time(f)?,
                Column::TruncationLimit => {
                    limit = f
                        .trim()
                        .parse()
                        .map_err(|_| WorkloadError::Params(format!("bad limit {f:?}")))?
                }
                Column::TruncationOrder => order = f.parse()?,
                Column::Threshold | Column::Threshold1 => p.threshold = Rounded3::parse(f)?,
                Column::Threshold2 => p.threshold2 = Rounded3::parse(f)?,
            }
        }
        p.trunc = TruncationSpec::new(limit, order)?;
        Ok(ReadQuery { kind, params: p })
    }

    pub fn parse_line(kind: QueryKind, line: &str) -> Result<ReadQuery> {
        let fields: Vec<&str> = line.split('|').collect();
        ReadQuery::parse_fields(kind, &fields)
    }
}

/// `amount > threshold`, exactly.
pub fn exceeds(amount: Money, threshold: Rounded3) -> bool {
    i128::from(amount.cents()) * 10 > i128::from(threshold.thousandths())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_round_trip() {
        for kind in QueryKind::ALL {
            let q = ReadQuery::new(
                kind,
                ReadParams {
                    id: 7,
                    id2: 9,
                    window: Window::new(
                        Timestamp::from_ymd(2020, 1, 1),
                        Timestamp::from_ymd(2021, 6, 30),
                    ),
                    threshold: Rounded3::from_thousandths(12_500),
                    threshold2: Rounded3::from_int(3),
                    trunc: TruncationSpec::new(20, TruncationOrder::AmountAscending).unwrap(),
                },
            );
            let back = ReadQuery::parse_line(kind, &q.to_line()).unwrap();
            assert_eq!(back.to_line(), q.to_line());
            assert_eq!(back, q.canonical());
            assert_eq!(kind.header().split('|').count(), q.values().len());
        }
    }

    #[test]
    fn raw_millis_and_bad_fields() {
        let q = ReadQuery::parse_line(QueryKind::Tsr2, "3|0|1000").unwrap();
        assert_eq!(q.params.window, Window::from_millis(0, 1000));
        assert!(ReadQuery::parse_line(QueryKind::Tsr2, "3|0").is_err());
        assert!(ReadQuery::parse_line(QueryKind::Tcr1, "3|0|1|0|TIMESTAMP_DESCENDING").is_err());
        assert!("tcr7".parse::<QueryKind>().is_ok());
    }

    #[test]
    fn exceeds_is_strict() {
        assert!(!exceeds(Money::units(10), Rounded3::from_int(10)));
        assert!(exceeds(Money::from_cents(1001), Rounded3::from_int(10)));
        assert!(exceeds(Money::from_cents(1), Rounded3::ZERO));
    }
}
