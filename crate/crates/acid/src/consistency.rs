//! Consistency: a materialized Account balance maintained by every money
//! movement must always equal the balance recomputed from the edges, both
//! after a pause and after crash recovery.

use std::sync::atomic::{AtomicUsize, Ordering};

use finbench_core::{Money, Window};
use finbench_engine::{
    Direction, EdgeKind, Engine, EngineError, Txn, Value, VertexKind, VertexRef,
};
use finbench_workloads::{apply_write, WorkloadError, Write};

use crate::check::balance_check;
use crate::clients::{retry, run_clients, RETRIES};
use crate::config::{AcidConfig, AcidTest};
use crate::error::{AcidError, Result};
use crate::report::AnomalyReport;

type EResult<T> = finbench_engine::Result<T>;

const INFLOW: [EdgeKind; 3] = [EdgeKind::Transfer, EdgeKind::Withdraw, EdgeKind::Deposit];
const OUTFLOW: [EdgeKind; 3] = [EdgeKind::Transfer, EdgeKind::Withdraw, EdgeKind::Repay];

/// Money in minus money out over every incident edge.
pub fn recompute_balance(t: &mut Txn, account: u64) -> EResult<Money> {
    let v = VertexRef::account(account);
    let w = Window::unbounded();
    let mut total = Money::ZERO;
    for k in INFLOW {
        total += t
            .neighbors(v, k, Direction::In, &w, None)?
            .iter()
            .map(|e| e.amount())
            .sum::<Money>();
    }
    for k in OUTFLOW {
        total -= t
            .neighbors(v, k, Direction::Out, &w, None)?
            .iter()
            .map(|e| e.amount())
            .sum::<Money>();
    }
    Ok(total)
}

/// Balance changes a write implies, per account.
pub fn balance_deltas(w: &Write) -> Vec<(u64, Money)> {
    match w {
        Write::Transfer {
            account_id1,
            account_id2,
            amount,
            ..
        }
        | Write::Withdraw {
            account_id1,
            account_id2,
            amount,
            ..
        } => vec![(*account_id1, -*amount), (*account_id2, *amount)],
        Write::Repay {
            account_id, amount, ..
        } => vec![(*account_id, -*amount)],
        Write::Deposit {
            account_id, amount, ..
        } => vec![(*account_id, *amount)],
        _ => Vec::new(),
    }
}

fn stored(t: &mut Txn, id: u64) -> EResult<Money> {
    Ok(t.get_property(VertexRef::account(id), "balance")?
        .as_ref()
        .and_then(Value::as_money)
        .unwrap_or(Money::ZERO))
}

fn maintain(t: &mut Txn, w: &Write) -> EResult<()> {
    match w {
        Write::AddPersonAccount { account_id, .. }
        | Write::AddCompanyAccount { account_id, .. } => {
            t.update_property(VertexRef::account(*account_id), "balance", Money::ZERO)
        }
        _ => {
            for (id, d) in balance_deltas(w) {
                let cur = stored(t, id)?;
                t.update_property(VertexRef::account(id), "balance", cur + d)?;
            }
            Ok(())
        }
    }
}

/// Sets every account's balance from its edges.
pub fn materialize(engine: &Engine) -> Result<()> {
    engine.run(RETRIES, |t| {
        for v in t.scan_vertices(VertexKind::Account)? {
            let b = recompute_balance(t, v.id.0)?;
            t.update_property(v.vref(), "balance", b)?;
        }
        Ok(())
    })?;
    Ok(())
}

/// `(account, stored, recomputed)` in cents for every account.
pub fn balance_rows(engine: &Engine) -> Result<Vec<(u64, i64, i64)>> {
    let rows = retry(engine, |t| {
        let ids: Vec<u64> = t
            .scan_vertices(VertexKind::Account)?
            .iter()
            .map(|v| v.id.0)
            .collect();
        ids.into_iter()
            .map(|id| {
                Ok((
                    id,
                    stored(t, id)?.cents(),
                    recompute_balance(t, id)?.cents(),
                ))
            })
            .collect::<EResult<Vec<_>>>()
    })?;
    rows.ok_or_else(|| AcidError::Client("balance scan kept conflicting".into()))
}

#[derive(Debug, Default)]
struct Counters {
    applied: AtomicUsize,
    rejected: AtomicUsize,
    gave_up: AtomicUsize,
}

/// Applies one write plus its balance maintenance, skipping the maintenance
/// when `skip` is set.
fn apply_one(engine: &Engine, w: &Write, skip: bool, n: &Counters) -> Result<()> {
    for _ in 0..=RETRIES {
        let mut t = engine.begin()?;
        let r = apply_write(&mut t, w).map(|_| ()).and_then(|_| {
            if skip {
                Ok(())
            } else {
                maintain(&mut t, w).map_err(WorkloadError::from)
            }
        });
        match r.and_then(|_| t.commit().map_err(WorkloadError::from)) {
            Ok(()) => {
                n.applied.fetch_add(1, Ordering::Relaxed);
                return Ok(());
            }
            Err(e) if e.is_conflict() => continue,
            Err(WorkloadError::Engine(EngineError::Crashed)) => {
                return Err(EngineError::Crashed.into())
            }
            Err(_) => {
                n.rejected.fetch_add(1, Ordering::Relaxed);
                return Ok(());
            }
        }
    }
    n.gave_up.fetch_add(1, Ordering::Relaxed);
    Ok(())
}

fn play(
    engine: &Engine,
    writes: &[(usize, &Write)],
    cfg: &AcidConfig,
    skip_every: Option<usize>,
    n: &Counters,
) -> Result<()> {
    let next = AtomicUsize::new(0);
    let run_cfg = AcidConfig {
        read_clients: 0,
        iterations: writes.len(),
        write_clients: if cfg.scripted { 1 } else { cfg.write_clients },
        ..cfg.clone()
    };
    run_clients(
        &run_cfg,
        |_| {
            let i = next.fetch_add(1, Ordering::SeqCst);
            let Some(&(idx, w)) = writes.get(i) else {
                return Ok(());
            };
            let skip = skip_every.is_some_and(|k| k > 0 && (idx + 1) % k == 0);
            apply_one(engine, w, skip, n)
        },
        |_| Ok(()),
    )
}

/// Runs the first `cfg.iterations` writes in two halves on a durable engine
/// holding the base graph. Checks the balances after the first half, then
/// crashes after the second, recovers and checks again. Deletes are left
/// out since they remove other accounts' edges. `skip_every` drops the
/// maintenance of every k-th write.
pub fn consistency_run(
    engine: Engine,
    writes: &[Write],
    cfg: &AcidConfig,
    skip_every: Option<usize>,
) -> Result<(AnomalyReport, Engine)> {
    if engine.config().wal_path.is_none() {
        return Err(AcidError::Setup(
            "consistency test needs a durable engine".into(),
        ));
    }
    materialize(&engine)?;
    let chosen: Vec<(usize, &Write)> = writes
        .iter()
        .filter(|w| !matches!(w, Write::DeleteAccount { .. }))
        .take(cfg.iterations)
        .enumerate()
        .collect();
    let (first, second) = chosen.split_at(chosen.len() / 2);
    let n = Counters::default();

    play(&engine, first, cfg, skip_every, &n)?;
    let mut violations: Vec<String> = balance_check(&balance_rows(&engine)?)
        .into_iter()
        .map(|v| format!("after pause: {v}"))
        .collect();

    play(&engine, second, cfg, skip_every, &n)?;
    let config = engine.config().clone();
    engine.crash();
    drop(engine);
    let recovered = Engine::open(config)?;
    let rows = balance_rows(&recovered)?;
    violations.extend(
        balance_check(&rows)
            .into_iter()
            .map(|v| format!("after recovery: {v}")),
    );
    let report = AnomalyReport::new(AcidTest::Consistency.name(), violations)
        .stat("accounts", rows.len())
        .stat("applied", n.applied.into_inner())
        .stat("rejected", n.rejected.into_inner())
        .stat("gave_up", n.gave_up.into_inner())
        .stat("recovery_micros", recovered.recovery_info().micros);
    Ok((report, recovered))
}
