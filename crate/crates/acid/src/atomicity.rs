//! Atomicity-C and Atomicity-RB.

use std::sync::atomic::{AtomicI64, AtomicUsize, Ordering};

use finbench_core::{Money, Timestamp};
use finbench_engine::{
    EdgeKind, EdgeRecord, Engine, EngineError, Txn, Value, VertexKind, VertexRef,
};
use parking_lot::Mutex;
use rand::Rng;

use crate::check::{atomicity_check, Counts};
use crate::clients::{account, list_prop, retry, run_clients, seed, RETRIES};
use crate::config::{AcidConfig, AcidTest};
use crate::error::Result;
use crate::report::AnomalyReport;

/// Accounts created by the C transaction start here.
const FRESH_IDS: i64 = 1_000_000;

/// Account 1 "AliceAcc" with history [100] and Account 2 "BobAcc" with
/// [50, 150].
pub fn seed_atomicity(engine: &Engine) -> Result<()> {
    seed(
        engine,
        vec![
            account(1)
                .with("name", "AliceAcc")
                .with("transHistory", vec![100i64]),
            account(2)
                .with("name", "BobAcc")
                .with("transHistory", vec![50i64, 150]),
        ],
    )
}

/// Full scan: number of accounts, of accounts with a name, and of
/// transHistory entries.
pub fn scan_counts(engine: &Engine) -> Result<Counts> {
    let rows = retry(engine, |t| t.scan_vertices(VertexKind::Account))?.unwrap_or_default();
    Ok(Counts {
        num_accounts: rows.len() as i64,
        num_names: rows.iter().filter(|v| v.get("name").is_some()).count() as i64,
        num_transferred: rows
            .iter()
            .filter_map(|v| v.get("transHistory").and_then(Value::as_int_list))
            .map(|h| h.len() as i64)
            .sum(),
    })
}

fn append(t: &mut Txn, id: u64, amount: i64) -> finbench_engine::Result<()> {
    let v = VertexRef::account(id);
    let mut h = list_prop(t, v, "transHistory")?;
    h.push(amount);
    t.update_property(v, "transHistory", h)
}

fn seeded_accounts(engine: &Engine) -> Result<Vec<u64>> {
    let rows = retry(engine, |t| t.scan_vertices(VertexKind::Account))?.unwrap_or_default();
    Ok(rows.iter().map(|v| v.id.0).collect())
}

fn single_client(cfg: &AcidConfig) -> AcidConfig {
    AcidConfig {
        write_clients: 1,
        read_clients: 0,
        ..cfg.clone()
    }
}

/// Every committed C transaction adds one account, one transfer and one
/// history entry; the final scan must show exactly that.
pub fn atomicity_c_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_atomicity(engine)?;
    let initial = scan_counts(engine)?;
    let ids = seeded_accounts(engine)?;
    let committed = Mutex::new(initial);
    let fresh = AtomicI64::new(FRESH_IDS);
    let gave_up = AtomicUsize::new(0);
    let cfg = if cfg.scripted {
        single_client(cfg)
    } else {
        cfg.clone()
    };
    let run_cfg = AcidConfig {
        read_clients: 0,
        ..cfg
    };
    run_clients(
        &run_cfg,
        |rng| {
            let a1 = ids[rng.gen_range(0..ids.len())];
            let amount = rng.gen_range(1..1000i64);
            let a2 = fresh.fetch_add(1, Ordering::Relaxed) as u64;
            let r = retry(engine, |t| {
                append(t, a1, amount)?;
                t.insert_vertex(account(a2))?;
                t.insert_edge(
                    EdgeRecord::new(
                        EdgeKind::Transfer,
                        VertexRef::account(a1),
                        VertexRef::account(a2),
                        Timestamp(amount),
                    )
                    .with_amount(Money::units(amount)),
                )?;
                Ok(())
            })?;
            match r {
                Some(()) => {
                    let mut c = committed.lock();
                    c.num_accounts += 1;
                    c.num_transferred += 1;
                }
                None => {
                    gave_up.fetch_add(1, Ordering::Relaxed);
                }
            }
            Ok(())
        },
        |_| Ok(()),
    )?;
    let committed = committed.into_inner();
    let fin = scan_counts(engine)?;
    Ok(
        AnomalyReport::new(AcidTest::AtomicityC.name(), atomicity_check(committed, fin))
            .stat("initial_accounts", initial.num_accounts)
            .stat("final_accounts", fin.num_accounts)
            .stat("gave_up", gave_up.into_inner()),
    )
}

/// RB transactions append to one account and abort when the account they
/// would create already exists; aborted work must leave no trace.
pub fn atomicity_rb_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_atomicity(engine)?;
    let initial = scan_counts(engine)?;
    let ids = seeded_accounts(engine)?;
    let committed = Mutex::new(initial);
    let aborted = AtomicUsize::new(0);
    let cfg = if cfg.scripted {
        single_client(cfg)
    } else {
        cfg.clone()
    };
    let run_cfg = AcidConfig {
        read_clients: 0,
        ..cfg.clone()
    };
    // Half the candidate ids get created along the way, so later picks abort.
    let id_range = 1..=(ids.len() as u64 + cfg.iterations as u64 / 2 + 1);
    run_clients(
        &run_cfg,
        |rng| {
            let a1 = ids[rng.gen_range(0..ids.len())];
            let a2 = rng.gen_range(id_range.clone());
            let amount = rng.gen_range(1..1000i64);
            for _ in 0..=RETRIES {
                let mut t = engine.begin()?;
                let step = (|| {
                    append(&mut t, a1, amount)?;
                    if t.vertex_exists(VertexRef::account(a2))? {
                        return Ok(false);
                    }
                    t.insert_vertex(account(a2))?;
                    Ok::<_, EngineError>(true)
                })();
                let outcome = match step {
                    Ok(true) => t.commit().map(|_| true),
                    Ok(false) => {
                        t.abort();
                        Ok(false)
                    }
                    Err(e) => {
                        t.abort();
                        Err(e)
                    }
                };
                match outcome {
                    Ok(true) => {
                        let mut c = committed.lock();
                        c.num_accounts += 1;
                        c.num_transferred += 1;
                        return Ok(());
                    }
                    Err(e) if e.is_conflict() => continue,
                    // Explicit rollback, or the uniqueness constraint did it.
                    Ok(false) | Err(EngineError::DuplicateVertex { .. }) => {
                        aborted.fetch_add(1, Ordering::Relaxed);
                        return Ok(());
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            aborted.fetch_add(1, Ordering::Relaxed);
            Ok(())
        },
        |_| Ok(()),
    )?;
    let committed = committed.into_inner();
    let fin = scan_counts(engine)?;
    Ok(AnomalyReport::new(
        AcidTest::AtomicityRb.name(),
        atomicity_check(committed, fin),
    )
    .stat("initial_accounts", initial.num_accounts)
    .stat("final_accounts", fin.num_accounts)
    .stat("aborted", aborted.into_inner()))
}
