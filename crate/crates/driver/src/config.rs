//! Run configuration and its `.properties` form.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use finbench_workloads::QueryKind;

use crate::error::{DriverError, Result};

/// Smallest accepted time-compression ratio.
pub const MIN_TCR: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    /// Wall-clock time per unit of simulation time.
    pub tcr: f64,
    pub warmup: Duration,
    pub window: Duration,
    pub workers: usize,
    /// One operation of the named kind per this many updates; 0 disables it.
    pub frequencies: BTreeMap<String, u32>,
    pub seed: u64,
    /// Retries of an operation that lost a lock conflict.
    pub retries: usize,
}

/// Every read and read-write kind the scheduler mixes in.
pub fn mixed_kinds() -> Vec<String> {
    let mut v: Vec<String> = QueryKind::ALL.iter().map(|k| k.name().to_owned()).collect();
    v.extend((1..=3).map(|n| format!("TRW{n}")));
    v
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let frequencies = mixed_kinds()
            .into_iter()
            .map(|k| {
                let f = if k.starts_with("TRW") { 50 } else { 20 };
                (k, f)
            })
            .collect();
        ScheduleConfig {
            tcr: 1.0,
            warmup: Duration::from_secs(30 * 60),
            window: Duration::from_secs(2 * 3600),
            workers: 4,
            frequencies,
            seed: 0,
            retries: 10,
        }
    }
}

pub type Properties = BTreeMap<String, String>;

/// `key=value` or `key: value` lines; `#` and `!` start comments.
pub fn parse_properties(text: &str) -> Result<Properties> {
    let mut out = Properties::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('!') {
            continue;
        }
        let Some(i) = line.find(['=', ':']) else {
            return Err(DriverError::Config(format!(
                "line {}: expected key=value, got {line:?}",
                n + 1
            )));
        };
        out.insert(line[..i].trim().to_owned(), line[i + 1..].trim().to_owned());
    }
    Ok(out)
}

pub fn read_properties(path: &Path) -> Result<Properties> {
    parse_properties(&std::fs::read_to_string(path)?)
}

/// Humantime text ("5s", "30m", "1h 30m") or bare milliseconds.
pub fn parse_duration(s: &str) -> Result<Duration> {
    let s = s.trim();
    if let Ok(ms) = s.parse::<u64>() {
        return Ok(Duration::from_millis(ms));
    }
    humantime::parse_duration(s)
        .map_err(|e| DriverError::Config(format!("bad duration {s:?}: {e}")))
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| DriverError::Config(format!("{key}: bad value {v:?}")))
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.tcr.is_finite() || self.tcr < MIN_TCR {
            return Err(DriverError::Config(format!(
                "time_compression_ratio must be >= {MIN_TCR}, got {}",
                self.tcr
            )));
        }
        if self.workers == 0 {
            return Err(DriverError::Config("thread_count must be positive".into()));
        }
        let known = mixed_kinds();
        for k in self.frequencies.keys() {
            if !known.contains(k) {
                return Err(DriverError::Config(format!("unknown operation {k:?}")));
            }
        }
        Ok(())
    }

    /// Applies recognised keys and returns the rest untouched.
    pub fn apply(&mut self, props: &Properties) -> Result<Properties> {
        let mut rest = Properties::new();
        for (k, v) in props {
            match k.as_str() {
                "time_compression_ratio" | "tcr" => self.tcr = parse_num(k, v)?,
                "warmup" | "warmup_duration" => self.warmup = parse_duration(v)?,
                "window" | "measurement" | "measurement_duration" => {
                    self.window = parse_duration(v)?
                }
                "thread_count" | "workers" => self.workers = parse_num(k, v)?,
                "seed" => self.seed = parse_num(k, v)?,
                "retries" => self.retries = parse_num(k, v)?,
                _ => match k.strip_suffix("_freq") {
                    Some(name) => {
                        self.frequencies
                            .insert(name.to_ascii_uppercase(), parse_num(k, v)?);
                    }
                    None => {
                        rest.insert(k.clone(), v.clone());
                    }
                },
            }
        }
        self.validate()?;
        Ok(rest)
    }

    pub fn frequency(&self, kind: &str) -> u32 {
        self.frequencies.get(kind).copied().unwrap_or(0)
    }
}
