//! Benchmark driver: scheduling, timed execution, results log, metrics and
//! validation mode.

mod config;
mod error;
mod exec;
mod metrics;
mod results;
mod schedule;
mod validate;

use std::path::Path;

use finbench_datagen::{ParamSet, UpdateStream};
use finbench_engine::Engine;

pub use config::{
    mixed_kinds, parse_duration, parse_properties, read_properties, Properties, ScheduleConfig,
    MIN_TCR,
};
pub use error::{DriverError, Result};
pub use exec::execute;
pub use metrics::{
    nearest_rank, ontime_check, summarize, KindStats, OnTime, RunSummary, ON_TIME_SHARE,
};
pub use results::{
    param_digest, LogRow, LogWriter, ResultsLog, CONFLICT, ERROR, OK, ON_TIME_MICROS,
};
pub use schedule::{build_schedule, wall_micros, Schedule, ScheduledOp};
pub use validate::{
    compare_rows, create_validation, field_matches, validate, Expected, QueryCheck,
    ValidationReport, ValidationSet,
};

pub const RESULTS_LOG: &str = "results_log.csv";
pub const SUMMARY_TEXT: &str = "summary.txt";
pub const SUMMARY_PROPERTIES: &str = "summary.properties";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub log: ResultsLog,
    pub summary: RunSummary,
    pub ontime: OnTime,
}

impl RunOutcome {
    pub fn properties(&self) -> String {
        let mut s = self.summary.to_properties();
        s.push_str(&format!("ontime_fraction={:.6}\n", self.ontime.fraction));
        s.push_str(&format!("ontime_pass={}\n", self.ontime.pass));
        s
    }
}

/// Schedules and plays the stream against a loaded engine. With
/// `results_dir`, the log is written there as it grows when `results_log`
/// is set, and the summary is always written.
pub fn run_benchmark(
    engine: &Engine,
    stream: &UpdateStream,
    params: &ParamSet,
    cfg: &ScheduleConfig,
    results_dir: Option<&Path>,
    results_log: bool,
) -> Result<RunOutcome> {
    let schedule = build_schedule(stream, params, cfg)?;
    let log_path = results_dir
        .filter(|_| results_log)
        .map(|d| d.join(RESULTS_LOG));
    let log = execute(&schedule, engine, cfg, log_path.as_deref())?;
    let out = RunOutcome {
        summary: summarize(&log),
        ontime: ontime_check(&log),
        log,
    };
    if let Some(dir) = results_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(SUMMARY_TEXT), out.summary.to_text())?;
        std::fs::write(dir.join(SUMMARY_PROPERTIES), out.properties())?;
    }
    Ok(out)
}
