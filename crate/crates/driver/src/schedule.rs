//! Turning an update stream and curated parameters into a timed operation list.

use finbench_datagen::{ParamSet, UpdateStream};
use finbench_workloads::{Operation, QueryKind};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScheduleConfig;
use crate::error::{DriverError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledOp {
    pub seq: u64,
    /// Microseconds after run start.
    pub scheduled_micros: u64,
    pub warmup: bool,
    pub op: Operation,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub ops: Vec<ScheduledOp>,
    pub warmup_micros: u64,
    pub window_micros: u64,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn write_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o.op, Operation::Write(_)))
            .count()
    }
}

/// Wall offset for a simulation offset: `sim_ms × tcr`, in microseconds.
pub fn wall_micros(sim_offset_ms: i64, tcr: f64) -> u64 {
    (sim_offset_ms.max(0) as f64 * tcr * 1000.0).round() as u64
}

/// Parameter rows per mixed kind, cycled from a seeded starting point.
struct Pool {
    name: String,
    every: u32,
    ops: Vec<Operation>,
    next: usize,
}

fn pools(params: &ParamSet, cfg: &ScheduleConfig) -> Vec<Pool> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let mut add = |name: String, mut ops: Vec<Operation>, rng: &mut ChaCha8Rng| {
        let every = cfg.frequency(&name);
        if every == 0 || ops.is_empty() {
            return;
        }
        ops.shuffle(rng);
        out.push(Pool {
            name,
            every,
            ops,
            next: 0,
        });
    };
    for kind in QueryKind::ALL {
        let ops = params
            .reads_of(kind)
            .iter()
            .cloned()
            .map(Operation::Read)
            .collect();
        add(kind.name().to_owned(), ops, &mut rng);
    }
    for (i, rows) in params.rw.iter().enumerate() {
        let ops = rows.iter().cloned().map(Operation::ReadWrite).collect();
        add(format!("TRW{}", i + 1), ops, &mut rng);
    }
    out
}

/// Updates at their compressed stream times, with reads and read-writes
/// slotted in after every `frequency`-th update. Only operations scheduled
/// before the end of warmup plus measurement window are kept.
pub fn build_schedule(
    stream: &UpdateStream,
    params: &ParamSet,
    cfg: &ScheduleConfig,
) -> Result<Schedule> {
    cfg.validate()?;
    let warmup_micros = cfg.warmup.as_micros() as u64;
    let window_micros = cfg.window.as_micros() as u64;
    let needed = warmup_micros + window_micros;
    let (Some(first), Some(last)) = (stream.events.first(), stream.events.last()) else {
        return Err(DriverError::InsufficientUpdates {
            available_micros: 0,
            needed_micros: needed,
        });
    };
    let t0 = first.time.0;
    let available = wall_micros(last.time.0 - t0, cfg.tcr);
    if available < needed {
        return Err(DriverError::InsufficientUpdates {
            available_micros: available,
            needed_micros: needed,
        });
    }

    let mut pools = pools(params, cfg);
    let mut ops = Vec::new();
    let push = |ops: &mut Vec<ScheduledOp>, at: u64, op: Operation| {
        let seq = ops.len() as u64;
        ops.push(ScheduledOp {
            seq,
            scheduled_micros: at,
            warmup: at < warmup_micros,
            op,
        });
    };
    for (n, ev) in stream.events.iter().enumerate() {
        let at = wall_micros(ev.time.0 - t0, cfg.tcr);
        if at >= needed {
            break;
        }
        push(&mut ops, at, Operation::Write(ev.op.clone()));
        let done = n as u64 + 1;
        for p in pools.iter_mut() {
            if done.is_multiple_of(p.every as u64) {
                let op = p.ops[p.next % p.ops.len()].clone();
                p.next += 1;
                log::trace!("{} after update {done}", p.name);
                push(&mut ops, at, op);
            }
        }
    }
    Ok(Schedule {
        ops,
        warmup_micros,
        window_micros,
    })
}
