//! Results log: one row per executed operation, in completion order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::Path;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{DriverError, Result};

pub const OK: &str = "OK";
pub const CONFLICT: &str = "CONFLICT";
pub const ERROR: &str = "ERROR";

/// Late means a start delay of a full second or more.
pub const ON_TIME_MICROS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRow {
    pub seq: u64,
    pub operation: String,
    pub param_digest: String,
    /// Microseconds after run start.
    pub scheduled_start_micros: u64,
    pub actual_start_micros: u64,
    pub duration_micros: u64,
    pub result_code: String,
    pub result_digest: String,
    pub warmup: bool,
}

impl LogRow {
    pub fn delay_micros(&self) -> u64 {
        self.actual_start_micros
            .saturating_sub(self.scheduled_start_micros)
    }

    pub fn on_time(&self) -> bool {
        self.delay_micros() < ON_TIME_MICROS
    }
}

/// Short digest of an operation's parameter line.
pub fn param_digest(line: &str) -> String {
    hex::encode(&Sha256::digest(line.as_bytes())[..8])
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsLog {
    pub rows: Vec<LogRow>,
    pub warmup_micros: u64,
    /// Wall time of the measurement window.
    pub measurement_micros: u64,
}

impl ResultsLog {
    pub fn measured(&self) -> impl Iterator<Item = &LogRow> {
        self.rows.iter().filter(|r| !r.warmup)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let w = LogWriter::create(path, self.warmup_micros)?;
        for r in &self.rows {
            w.append(r)?;
        }
        w.finish(self.measurement_micros)
    }

    pub fn read(path: &Path) -> Result<ResultsLog> {
        let f = File::open(path)?;
        let mut log = ResultsLog::default();
        let mut body = String::new();
        for line in BufReader::new(f).lines() {
            let line = line?;
            if let Some(meta) = line.strip_prefix('#') {
                let Some((k, v)) = meta.trim().split_once('=') else {
                    continue;
                };
                let v: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| DriverError::Log(format!("bad header line {line:?}")))?;
                match k.trim() {
                    "warmup_micros" => log.warmup_micros = v,
                    "measurement_micros" => log.measurement_micros = v,
                    _ => {}
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut rd = csv::ReaderBuilder::new()
            .delimiter(b'|')
            .from_reader(body.as_bytes());
        for r in rd.deserialize() {
            log.rows.push(r?);
        }
        Ok(log)
    }
}

/// Appends rows to disk as they complete. Safe to share between workers.
pub struct LogWriter {
    inner: Mutex<Option<csv::Writer<BufWriter<File>>>>,
}

impl LogWriter {
    pub fn create(path: &Path, warmup_micros: u64) -> Result<LogWriter> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = BufWriter::new(File::create(path)?);
        writeln!(f, "# warmup_micros={warmup_micros}")?;
        let w = csv::WriterBuilder::new().delimiter(b'|').from_writer(f);
        Ok(LogWriter {
            inner: Mutex::new(Some(w)),
        })
    }

    pub fn append(&self, row: &LogRow) -> Result<()> {
        let mut g = self.inner.lock();
        let w = g
            .as_mut()
            .ok_or_else(|| DriverError::Log("writer already finished".into()))?;
        w.serialize(row)?;
        w.flush()?;
        Ok(())
    }

    /// Writes the trailing measurement line and closes the file.
    pub fn finish(&self, measurement_micros: u64) -> Result<()> {
        let Some(w) = self.inner.lock().take() else {
            return Ok(());
        };
        let mut f = w
            .into_inner()
            .map_err(|e| DriverError::Log(e.to_string()))?;
        writeln!(f, "# measurement_micros={measurement_micros}")?;
        f.flush()?;
        Ok(())
    }
}
