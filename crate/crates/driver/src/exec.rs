//! Worker pool that plays a schedule against an engine.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use finbench_engine::Engine;
use finbench_workloads::Operation;
use parking_lot::{Condvar, Mutex};

use crate::config::ScheduleConfig;
use crate::error::Result;
use crate::results::{param_digest, LogRow, LogWriter, ResultsLog, CONFLICT, ERROR, OK};
use crate::schedule::Schedule;

/// Sleeps until `at`; never returns early.
fn wait_until(at: Instant) {
    loop {
        let now = Instant::now();
        if now >= at {
            return;
        }
        thread::sleep(at - now);
    }
}

fn micros(d: Duration) -> u64 {
    d.as_micros() as u64
}

/// Writes complete one at a time in schedule order, so later updates always
/// see the entities they depend on.
struct WriteGate {
    done: Mutex<usize>,
    cv: Condvar,
}

impl WriteGate {
    fn wait_turn(&self, index: usize) {
        let mut g = self.done.lock();
        while *g < index {
            self.cv.wait(&mut g);
        }
    }

    fn release(&self) {
        *self.done.lock() += 1;
        self.cv.notify_all();
    }
}

/// Runs every scheduled operation with `cfg.workers` threads. Rows are
/// appended to `log_path`, if given, as each operation completes.
pub fn execute(
    schedule: &Schedule,
    engine: &Engine,
    cfg: &ScheduleConfig,
    log_path: Option<&Path>,
) -> Result<ResultsLog> {
    let writer = log_path
        .map(|p| LogWriter::create(p, schedule.warmup_micros))
        .transpose()?;
    let mut write_index = Vec::with_capacity(schedule.len());
    let mut w = 0;
    for s in &schedule.ops {
        write_index.push(w);
        if matches!(s.op, Operation::Write(_)) {
            w += 1;
        }
    }

    let next = AtomicUsize::new(0);
    let gate = WriteGate {
        done: Mutex::new(0),
        cv: Condvar::new(),
    };
    let rows: Mutex<Vec<LogRow>> = Mutex::new(Vec::with_capacity(schedule.len()));
    let log_err: Mutex<Option<crate::error::DriverError>> = Mutex::new(None);
    let start = Instant::now();

    thread::scope(|s| {
        for _ in 0..cfg.workers.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(item) = schedule.ops.get(i) else {
                    break;
                };
                wait_until(start + Duration::from_micros(item.scheduled_micros));
                let is_write = matches!(item.op, Operation::Write(_));
                if is_write {
                    gate.wait_turn(write_index[i]);
                }
                let began = Instant::now();
                let (res, _) = item.op.execute_with_retries(engine, cfg.retries);
                let ended = Instant::now();
                if is_write {
                    gate.release();
                }
                let (code, digest) = match &res {
                    Ok(r) => (OK.to_owned(), r.digest()),
                    Err(e) if e.is_conflict() => (CONFLICT.to_owned(), String::new()),
                    Err(e) => {
                        log::debug!("{} failed: {e}", item.op.to_line());
                        (ERROR.to_owned(), String::new())
                    }
                };
                let row = LogRow {
                    seq: item.seq,
                    operation: item.op.name(),
                    param_digest: param_digest(&item.op.to_line()),
                    scheduled_start_micros: item.scheduled_micros,
                    actual_start_micros: micros(began - start),
                    duration_micros: micros(ended - began),
                    result_code: code,
                    result_digest: digest,
                    warmup: item.warmup,
                };
                // rows land in completion order
                let mut g = rows.lock();
                if let Some(wr) = &writer {
                    if let Err(e) = wr.append(&row) {
                        log_err.lock().get_or_insert(e);
                    }
                }
                g.push(row);
            });
        }
    });

    let rows = rows.into_inner();
    let window_start = schedule.warmup_micros;
    let overrun = rows
        .iter()
        .filter(|r| !r.warmup)
        .map(|r| r.actual_start_micros + r.duration_micros)
        .max()
        .map_or(0, |end| end.saturating_sub(window_start));
    let log = ResultsLog {
        rows,
        warmup_micros: schedule.warmup_micros,
        measurement_micros: schedule.window_micros.max(overrun),
    };
    if let Some(e) = log_err.into_inner() {
        return Err(e);
    }
    if let Some(wr) = writer {
        wr.finish(log.measurement_micros)?;
    }
    Ok(log)
}
