//! Validation mode: replay read parameters and compare with expected rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use finbench_engine::Engine;
use finbench_workloads::{read, QueryKind, ReadQuery};
use serde::{Deserialize, Serialize};

use crate::error::{DriverError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    /// Parameter line in the kind's column order.
    pub params: String,
    pub rows: Vec<String>,
}

/// Expected results keyed by query name ("TCR1" ...).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationSet {
    pub kinds: BTreeMap<String, Vec<Expected>>,
}

impl ValidationSet {
    pub fn push(&mut self, kind: QueryKind, params: String, rows: Vec<String>) {
        self.kinds
            .entry(kind.name().to_owned())
            .or_default()
            .push(Expected { params, rows });
    }

    pub fn len(&self) -> usize {
        self.kinds.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn load(path: &Path) -> Result<ValidationSet> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            DriverError::Validation(format!("missing expected file {}: {e}", path.display()))
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

fn run(engine: &Engine, q: &ReadQuery) -> Result<Vec<String>> {
    let mut t = engine
        .begin()
        .map_err(finbench_workloads::WorkloadError::from)?;
    let r = read::execute(&mut t, q)?;
    t.commit()
        .map_err(finbench_workloads::WorkloadError::from)?;
    Ok(r.to_rows())
}

/// Expected rows for `queries` as answered by `engine`.
pub fn create_validation(engine: &Engine, queries: &[ReadQuery]) -> Result<ValidationSet> {
    let mut set = ValidationSet::default();
    for q in queries {
        set.push(q.kind, q.to_line(), run(engine, q)?);
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryCheck {
    pub kind: String,
    pub params: String,
    /// First difference, if any.
    pub mismatch: Option<String>,
}

impl QueryCheck {
    pub fn pass(&self) -> bool {
        self.mismatch.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<QueryCheck>,
}

impl ValidationReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass()).count()
    }

    pub fn pass(&self) -> bool {
        self.failed() == 0
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            match &c.mismatch {
                None => {
                    let _ = writeln!(s, "PASS {} {}", c.kind, c.params);
                }
                Some(m) => {
                    let _ = writeln!(s, "FAIL {} {}: {m}", c.kind, c.params);
                }
            }
        }
        let _ = writeln!(
            s,
            "{} of {} queries match",
            self.checks.len() - self.failed(),
            self.checks.len()
        );
        s
    }
}

fn three_decimals(s: &str) -> bool {
    s.split_once('.')
        .is_some_and(|(_, frac)| frac.len() == 3 && frac.bytes().all(|b| b.is_ascii_digit()))
}

/// Rounded three-decimal values must match exactly; other numbers to eight
/// significant digits; anything else as text.
pub fn field_matches(expected: &str, actual: &str) -> bool {
    if expected == actual {
        return true;
    }
    let (Ok(a), Ok(b)) = (expected.parse::<f64>(), actual.parse::<f64>()) else {
        return false;
    };
    if three_decimals(expected) && three_decimals(actual) {
        return a == b;
    }
    format!("{a:.7e}") == format!("{b:.7e}")
}

/// First difference between two row lists. Path results are compared as
/// sets since their order beyond length is not fixed.
pub fn compare_rows(kind: QueryKind, expected: &[String], actual: &[String]) -> Option<String> {
    let (mut e, mut a) = (expected.to_vec(), actual.to_vec());
    if kind == QueryKind::Tcr5 {
        e.sort();
        a.sort();
    }
    if e.len() != a.len() {
        return Some(format!("expected {} rows, got {}", e.len(), a.len()));
    }
    for (i, (er, ar)) in e.iter().zip(&a).enumerate() {
        let ef: Vec<&str> = er.split('|').collect();
        let af: Vec<&str> = ar.split('|').collect();
        if ef.len() != af.len() {
            return Some(format!("row {i}: expected {er:?}, got {ar:?}"));
        }
        for (j, (x, y)) in ef.iter().zip(&af).enumerate() {
            if !field_matches(x, y) {
                return Some(format!(
                    "row {i} field {j}: expected {x}, got {y} (row {er:?} vs {ar:?})"
                ));
            }
        }
    }
    None
}

pub fn validate(engine: &Engine, set: &ValidationSet) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for (name, entries) in &set.kinds {
        let kind: QueryKind = name.parse()?;
        for ex in entries {
            let q = ReadQuery::parse_line(kind, &ex.params)?;
            let mismatch = match run(engine, &q) {
                Ok(rows) => compare_rows(kind, &ex.rows, &rows),
                Err(e) => Some(format!("query failed: {e}")),
            };
            report.checks.push(QueryCheck {
                kind: name.clone(),
                params: ex.params.clone(),
                mismatch,
            });
        }
    }
    Ok(report)
}
