//! Seeding helpers and the concurrent client harness.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::thread;

use finbench_core::Timestamp;
use finbench_engine::{Engine, Txn, Value, VertexKind, VertexRecord, VertexRef};
use parking_lot::Mutex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::AcidConfig;
use crate::error::{AcidError, Result};

/// Conflict retries before a client gives up on one transaction.
pub(crate) const RETRIES: usize = 50;

pub(crate) fn account(id: u64) -> VertexRecord {
    VertexRecord::new(VertexKind::Account, id)
        .with("createTime", Timestamp::from_ymd(2020, 1, 1))
        .with("isBlocked", false)
        .with("type", "normal")
}

pub(crate) fn int_prop(t: &mut Txn, v: VertexRef, name: &str) -> finbench_engine::Result<i64> {
    Ok(t.get_property(v, name)?
        .as_ref()
        .and_then(Value::as_int)
        .unwrap_or(0))
}

pub(crate) fn list_prop(
    t: &mut Txn,
    v: VertexRef,
    name: &str,
) -> finbench_engine::Result<Vec<i64>> {
    Ok(t.get_property(v, name)?
        .as_ref()
        .and_then(Value::as_int_list)
        .map(<[i64]>::to_vec)
        .unwrap_or_default())
}

pub(crate) fn seed(engine: &Engine, vertices: Vec<VertexRecord>) -> Result<()> {
    engine
        .run(0, |t| {
            for v in &vertices {
                t.insert_vertex(v.clone())?;
            }
            Ok(())
        })
        .map_err(|e| AcidError::Setup(e.to_string()))
}

/// Runs `f` in fresh transactions until one commits. `None` when every
/// attempt lost a conflict.
pub(crate) fn retry<T>(
    engine: &Engine,
    f: impl FnMut(&mut Txn) -> finbench_engine::Result<T>,
) -> Result<Option<T>> {
    match engine.run(RETRIES, f) {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_conflict() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn rng_for(cfg: &AcidConfig, client: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        cfg.seed
            .wrapping_add((client as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    )
}

pub(crate) fn pause(cfg: &AcidConfig) {
    if !cfg.sleep.is_zero() {
        thread::sleep(cfg.sleep);
    }
}

/// Spawns the write and read clients. Writers share `cfg.iterations`
/// transactions; readers share as many.
pub(crate) fn run_clients<W, R>(cfg: &AcidConfig, writer: W, reader: R) -> Result<()>
where
    W: Fn(&mut ChaCha8Rng) -> Result<()> + Sync,
    R: Fn(&mut ChaCha8Rng) -> Result<()> + Sync,
{
    let writes = AtomicUsize::new(0);
    let reads = AtomicUsize::new(0);
    let failed: Mutex<Option<AcidError>> = Mutex::new(None);
    let stop = AtomicBool::new(false);
    let fail = |e: AcidError| {
        stop.store(true, Ordering::SeqCst);
        failed.lock().get_or_insert(e);
    };
    thread::scope(|s| {
        for c in 0..cfg.write_clients {
            let (writer, writes, fail, stop) = (&writer, &writes, &fail, &stop);
            s.spawn(move || {
                let mut rng = rng_for(cfg, c);
                while !stop.load(Ordering::SeqCst)
                    && writes.fetch_add(1, Ordering::SeqCst) < cfg.iterations
                {
                    if let Err(e) = writer(&mut rng) {
                        fail(e);
                    }
                }
            });
        }
        for c in 0..cfg.read_clients {
            let (reader, reads, fail, stop) = (&reader, &reads, &fail, &stop);
            s.spawn(move || {
                let mut rng = rng_for(cfg, cfg.write_clients + c);
                while !stop.load(Ordering::SeqCst)
                    && reads.fetch_add(1, Ordering::SeqCst) < cfg.iterations
                {
                    if let Err(e) = reader(&mut rng) {
                        fail(e);
                    }
                }
            });
        }
    });
    match failed.into_inner() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
