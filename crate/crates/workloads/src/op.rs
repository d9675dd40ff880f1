//! A single benchmark operation of any class, as scheduled by the driver.

use finbench_engine::{DeleteSummary, Engine};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, WorkloadError};
use crate::query::{QueryKind, ReadQuery};
use crate::read;
use crate::result::QueryResult;
use crate::rw::{ReadWrite, RwOutcome};
use crate::write::{apply_write, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "op")]
pub enum Operation {
    Read(ReadQuery),
    Write(Write),
    ReadWrite(ReadWrite),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpResult {
    Read(QueryResult),
    Write(Option<DeleteSummary>),
    ReadWrite(RwOutcome),
}

impl OpResult {
    pub fn rows(&self) -> Vec<String> {
        match self {
            OpResult::Read(r) => r.to_rows(),
            OpResult::Write(None) => vec!["ok".into()],
            OpResult::Write(Some(s)) => vec![s.to_string()],
            OpResult::ReadWrite(o) => vec![format!("{o:?}")],
        }
    }

    /// Short stable fingerprint of the result rows.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for r in self.rows() {
            h.update(r.as_bytes());
            h.update(b"\n");
        }
        hex::encode(&h.finalize()[..8])
    }
}

impl Operation {
    pub fn name(&self) -> String {
        match self {
            Operation::Read(q) => q.kind.name().to_owned(),
            Operation::Write(w) => w.name(),
            Operation::ReadWrite(rw) => rw.name(),
        }
    }

    pub fn fields(&self) -> Vec<String> {
        match self {
            Operation::Read(q) => q.values(),
            Operation::Write(w) => w.fields(),
            Operation::ReadWrite(rw) => rw.fields(),
        }
    }

    /// `NAME|field|field...`
    pub fn to_line(&self) -> String {
        let mut v = vec![self.name()];
        v.extend(self.fields());
        v.join("|")
    }

    pub fn parse_line(line: &str) -> Result<Operation> {
        let mut parts = line.split('|');
        let name = parts.next().unwrap_or("").trim();
        let fields: Vec<&str> = parts.collect();
        let upper = name.to_ascii_uppercase();
        let num = |prefix: &str| -> Option<u8> { upper.strip_prefix(prefix)?.parse().ok() };
        if let Some(n) = num("TRW") {
            return Ok(Operation::ReadWrite(ReadWrite::from_fields(n, &fields)?));
        }
        if let Some(n) = num("TW") {
            return Ok(Operation::Write(Write::from_fields(n, &fields)?));
        }
        let kind: QueryKind = name.parse()?;
        Ok(Operation::Read(ReadQuery::parse_fields(kind, &fields)?))
    }

    pub fn is_read_only(&self) -> bool {
        matches!(self, Operation::Read(_))
    }

    /// Executes once in fresh transactions, without retrying.
    pub fn execute(&self, engine: &Engine) -> Result<OpResult> {
        match self {
            Operation::Read(q) => {
                let mut t = engine.begin()?;
                let r = read::execute(&mut t, q)?;
                t.commit()?;
                Ok(OpResult::Read(r))
            }
            Operation::Write(w) => {
                let mut t = engine.begin()?;
                let r = apply_write(&mut t, w)?;
                t.commit()?;
                Ok(OpResult::Write(r))
            }
            Operation::ReadWrite(rw) => Ok(OpResult::ReadWrite(rw.run(engine)?)),
        }
    }

    /// Executes, retrying lock conflicts up to `retries` times. Returns the
    /// result and the number of retries used.
    pub fn execute_with_retries(
        &self,
        engine: &Engine,
        retries: usize,
    ) -> (std::result::Result<OpResult, WorkloadError>, usize) {
        let mut used = 0;
        loop {
            match self.execute(engine) {
                Err(e) if e.is_conflict() && used < retries => used += 1,
                other => return (other, used),
            }
        }
    }
}
