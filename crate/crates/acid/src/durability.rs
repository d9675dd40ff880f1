//! Durability: replay a prefix of the write stream on a durable engine,
//! terminate it without any flush at a random point, recover, and compare
//! with what the driver saw committed.

use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use finbench_core::Window;
use finbench_engine::{
    wal, Direction, Engine, EngineConfig, EngineError, IsolationLevel, Txn, Value, VertexKind,
    VertexRef,
};
use finbench_workloads::{apply_write, Write};
use rand::Rng;

use crate::clients::{retry, rng_for};
use crate::config::{AcidConfig, AcidTest};
use crate::error::Result;
use crate::report::AnomalyReport;
use crate::workload::Workload;

type EResult<T> = finbench_engine::Result<T>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurabilityTrial {
    /// Writes attempted before the crash.
    pub cut: usize,
    /// Writes the driver saw commit.
    pub committed: usize,
    /// Stream index of the last committed write.
    pub last_committed: Option<usize>,
    /// A partial frame was left at the log tail.
    pub torn_tail: bool,
    pub recovery_micros: u64,
    /// The last committed write is readable after recovery.
    pub visible: bool,
    /// Recovered state equals the committed prefix replayed from scratch.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct DurabilityOutcome {
    pub report: AnomalyReport,
    pub trials: Vec<DurabilityTrial>,
}

/// Attempts each write in its own transaction and returns the indices
/// that committed, as a driver log would record them.
pub fn apply_logged(engine: &Engine, writes: &[Write]) -> Result<Vec<usize>> {
    let mut log = Vec::new();
    for (i, w) in writes.iter().enumerate() {
        let mut t = engine.begin()?;
        if apply_write(&mut t, w).is_ok() && t.commit().is_ok() {
            log.push(i);
        }
    }
    Ok(log)
}

fn absent_is_false(r: EResult<bool>) -> EResult<bool> {
    match r {
        Err(EngineError::VertexNotFound { .. }) => Ok(false),
        other => other,
    }
}

fn flag_set(t: &mut Txn, v: VertexRef) -> EResult<bool> {
    absent_is_false(
        t.get_property(v, "isBlocked")
            .map(|p| p.as_ref().and_then(Value::as_bool) == Some(true)),
    )
}

/// Whether the effect of `w` can be read back.
pub fn write_visible(t: &mut Txn, w: &Write) -> EResult<bool> {
    match w {
        Write::DeleteAccount { account_id } => {
            Ok(!t.vertex_exists(VertexRef::account(*account_id))?)
        }
        Write::BlockAccount { account_id } => flag_set(t, VertexRef::account(*account_id)),
        Write::BlockPerson { person_id } => flag_set(t, VertexRef::person(*person_id)),
        _ => {
            let (vertices, edges) = w.records().unwrap_or_default();
            for v in vertices {
                match t.get_vertex(v.kind, v.id.0)? {
                    Some(r) if r.props == v.props => {}
                    _ => return Ok(false),
                }
            }
            let window = Window::unbounded();
            for e in edges {
                let found = absent_is_false(
                    t.neighbors(e.src, e.kind, Direction::Out, &window, None)
                        .map(|out| {
                            out.iter().any(|x| {
                                x.dst == e.dst && x.timestamp == e.timestamp && x.props == e.props
                            })
                        }),
                );
                if !found? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn fresh_path(dir: &Path, trial: usize) -> std::io::Result<PathBuf> {
    let path = dir.join(format!("durability-{trial}.wal"));
    for p in [path.clone(), wal::snapshot_path(&path)] {
        if p.exists() {
            std::fs::remove_file(p)?;
        }
    }
    Ok(path)
}

/// Appends the start of a frame whose body never made it to disk.
fn tear_tail(path: &Path, rng: &mut impl Rng) -> std::io::Result<()> {
    let body: Vec<u8> = (0..rng.gen_range(0..32)).map(|_| rng.gen()).collect();
    let claimed = body.len() as u32 + 64;
    let mut f = OpenOptions::new().append(true).open(path)?;
    f.write_all(&claimed.to_le_bytes())?;
    f.write_all(&rng.gen::<u32>().to_le_bytes())?;
    f.write_all(&body)?;
    Ok(())
}

fn run_trial(
    dir: &Path,
    isolation: IsolationLevel,
    workload: &Workload,
    cfg: &AcidConfig,
    trial: usize,
) -> Result<DurabilityTrial> {
    let mut rng = rng_for(cfg, trial);
    let limit = workload.writes.len().min(cfg.iterations);
    let cut = rng.gen_range(0..=limit);
    let path = fresh_path(dir, trial)?;
    let config = EngineConfig::durable(isolation, &path);
    let engine = Engine::open(config.clone())?;
    engine.bulk_load(workload.vertices.clone(), workload.edges.clone())?;
    let log = apply_logged(&engine, &workload.writes[..cut])?;
    // One more write is in flight when the process dies.
    let in_flight = match workload.writes.get(cut) {
        Some(w) => {
            let mut t = engine.begin()?;
            let _ = apply_write(&mut t, w);
            Some(t)
        }
        None => None,
    };
    engine.crash();
    drop(in_flight);
    drop(engine);
    let torn_tail = rng.gen_bool(0.5) && path.exists();
    if torn_tail {
        tear_tail(&path, &mut rng)?;
    }

    let recovered = Engine::open(config)?;
    let reference = Engine::volatile(isolation);
    reference.bulk_load(workload.vertices.clone(), workload.edges.clone())?;
    let expected_log = apply_logged(&reference, &workload.writes[..cut])?;

    let last_committed = log.last().copied();
    let visible = match last_committed {
        Some(i) => retry(&recovered, |t| write_visible(t, &workload.writes[i]))?.unwrap_or(false),
        None => {
            recovered.vertex_count_of(VertexKind::Account)
                == reference.vertex_count_of(VertexKind::Account)
        }
    };
    Ok(DurabilityTrial {
        cut,
        committed: log.len(),
        last_committed,
        torn_tail,
        recovery_micros: recovered.recovery_info().micros,
        visible,
        exact: expected_log == log && recovered.state_digest() == reference.state_digest(),
    })
}

/// `cfg.durability_trials` crash trials with random cut points, each on
/// its own log file under `dir`.
pub fn durability_run(
    dir: &Path,
    isolation: IsolationLevel,
    workload: &Workload,
    cfg: &AcidConfig,
) -> Result<DurabilityOutcome> {
    std::fs::create_dir_all(dir)?;
    let mut trials = Vec::new();
    let mut violations = Vec::new();
    for i in 0..cfg.durability_trials {
        let t = run_trial(dir, isolation, workload, cfg, i)?;
        if !t.visible {
            violations.push(format!(
                "trial {i}: last committed write {:?} not visible after recovery",
                t.last_committed
            ));
        }
        if !t.exact {
            violations.push(format!(
                "trial {i}: recovered state differs from the {} committed writes",
                t.committed
            ));
        }
        trials.push(t);
    }
    let micros: Vec<u64> = trials.iter().map(|t| t.recovery_micros).collect();
    let mean = if micros.is_empty() {
        0
    } else {
        micros.iter().sum::<u64>() / micros.len() as u64
    };
    let report = AnomalyReport::new(AcidTest::Durability.name(), violations)
        .stat("trials", trials.len())
        .stat("torn_tails", trials.iter().filter(|t| t.torn_tail).count())
        .stat("recovery_micros_mean", mean)
        .stat(
            "recovery_micros_max",
            micros.iter().max().copied().unwrap_or(0),
        );
    Ok(DurabilityOutcome { report, trials })
}
