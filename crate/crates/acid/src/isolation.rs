//! The ten isolation tests. Each seeds its test graph into an empty engine,
//! runs write and read clients (or the scripted interleaving), and checks
//! only what the clients observed.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicI64, AtomicUsize, Ordering};
use std::sync::Arc;

use finbench_core::{Money, Timestamp, Window};
use finbench_engine::{
    Direction, EdgeKind, EdgeRecord, Engine, EngineError, Txn, Value, VertexKind, VertexRef,
};
use parking_lot::Mutex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::check::{self, CycleReads, G0Histories};
use crate::clients::{account, int_prop, list_prop, pause, retry, run_clients, seed};
use crate::config::{AcidConfig, AcidTest};
use crate::error::Result;
use crate::report::AnomalyReport;
use crate::scripted::Script;

type EResult<T> = finbench_engine::Result<T>;

const ACCOUNTS: u64 = 10;
const PAIRS: u64 = 10;
const CYCLES: u64 = 5;
/// Accounts created during a run start here.
const FRESH_IDS: i64 = 1_000_000;

#[derive(Default)]
struct Tally {
    commits: AtomicUsize,
    gave_up: AtomicUsize,
}

impl Tally {
    fn note<T>(&self, r: &Option<T>) {
        match r {
            Some(_) => self.commits.fetch_add(1, Ordering::Relaxed),
            None => self.gave_up.fetch_add(1, Ordering::Relaxed),
        };
    }

    fn into_report(
        self,
        test: AcidTest,
        violations: Vec<String>,
        observed: usize,
    ) -> AnomalyReport {
        AnomalyReport::new(test.name(), violations)
            .stat("commits", self.commits.into_inner())
            .stat("gave_up", self.gave_up.into_inner())
            .stat("observations", observed)
    }
}

fn acct(id: u64) -> VertexRef {
    VertexRef::account(id)
}

fn pick(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.gen_range(1..=n)
}

fn pick_two(rng: &mut ChaCha8Rng, n: u64) -> (u64, u64) {
    let a = pick(rng, n);
    let mut b = pick(rng, n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn transfer(src: u64, dst: u64, ts: i64) -> EdgeRecord {
    EdgeRecord::new(EdgeKind::Transfer, acct(src), acct(dst), Timestamp(ts))
        .with_amount(Money::units(1))
}

fn seed_balances(engine: &Engine, n: u64, prop: &str, value: i64) -> Result<()> {
    seed(
        engine,
        (1..=n).map(|id| account(id).with(prop, value)).collect(),
    )
}

// G0

fn append_vertex(t: &mut Txn, v: VertexRef, tid: i64) -> EResult<()> {
    let mut h = list_prop(t, v, "versionHistory")?;
    h.push(tid);
    t.update_property(v, "versionHistory", h)
}

fn append_edge(t: &mut Txn, eid: u64, tid: i64) -> EResult<()> {
    let e = t
        .get_edge(EdgeKind::Transfer, eid)?
        .ok_or(EngineError::EdgeNotFound {
            kind: EdgeKind::Transfer,
            edge_id: eid,
        })?;
    let mut h = e
        .get("versionHistory")
        .and_then(Value::as_int_list)
        .map(<[i64]>::to_vec)
        .unwrap_or_default();
    h.push(tid);
    t.update_edge_property(EdgeKind::Transfer, eid, "versionHistory", h)
}

/// `(a1, a2, transfer edge id)` per pair.
fn seed_g0(engine: &Engine) -> Result<Vec<(u64, u64, u64)>> {
    let empty: Vec<i64> = Vec::new();
    seed(
        engine,
        (1..=2 * PAIRS)
            .map(|id| account(id).with("versionHistory", empty.clone()))
            .collect(),
    )?;
    let pairs = engine.run(0, |t| {
        (0..PAIRS)
            .map(|k| {
                let (a1, a2) = (2 * k + 1, 2 * k + 2);
                let e = transfer(a1, a2, 1).with("versionHistory", empty.clone());
                Ok((a1, a2, t.insert_edge(e)?.0))
            })
            .collect::<EResult<Vec<_>>>()
    })?;
    Ok(pairs)
}

fn read_g0(engine: &Engine, pairs: &[(u64, u64, u64)]) -> Result<Vec<G0Histories>> {
    let mut out = Vec::new();
    for &(a1, a2, eid) in pairs {
        let h = retry(engine, |t| {
            let e = t.get_edge(EdgeKind::Transfer, eid)?;
            let eh = e
                .as_ref()
                .and_then(|e| e.get("versionHistory"))
                .and_then(Value::as_int_list)
                .map(<[i64]>::to_vec)
                .unwrap_or_default();
            Ok([
                list_prop(t, acct(a1), "versionHistory")?,
                eh,
                list_prop(t, acct(a2), "versionHistory")?,
            ])
        })?;
        out.extend(h);
    }
    Ok(out)
}

/// Dirty write: writers append their txn id to both accounts and the
/// transfer edge of a pair.
pub fn g0_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    let pairs = seed_g0(engine)?;
    let tally = Tally::default();
    if cfg.scripted {
        let (a1, a2, eid) = pairs[0];
        let mut s = Script::default();
        for _ in 0..2 {
            let e = engine.clone();
            s.txn(move |p| {
                let mut t = e.begin()?;
                let tid = t.id() as i64;
                append_vertex(&mut t, acct(a1), tid)?;
                p.point();
                append_edge(&mut t, eid, tid)?;
                append_vertex(&mut t, acct(a2), tid)?;
                t.commit()
            });
        }
        s.play(cfg)?;
    } else {
        run_clients(
            cfg,
            |rng| {
                let (a1, a2, eid) = pairs[rng.gen_range(0..pairs.len())];
                let r = retry(engine, |t| {
                    let tid = t.id() as i64;
                    append_vertex(t, acct(a1), tid)?;
                    pause(cfg);
                    append_edge(t, eid, tid)?;
                    append_vertex(t, acct(a2), tid)
                })?;
                tally.note(&r);
                Ok(())
            },
            |_| Ok(()),
        )?;
    }
    let hist = read_g0(engine, &pairs)?;
    Ok(tally.into_report(AcidTest::G0, check::g0_check(&hist), hist.len()))
}

// G1a, G1b

fn read_balance(engine: &Engine, id: u64) -> Result<Option<i64>> {
    retry(engine, |t| int_prop(t, acct(id), "balance"))
}

/// Aborted reads: writers set an even balance and always abort.
pub fn g1a_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_balances(engine, ACCOUNTS, "balance", 99)?;
    let reads = Arc::new(Mutex::new(Vec::new()));
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        let e = engine.clone();
        s.txn(move |p| {
            let mut t = e.begin()?;
            t.update_property(acct(1), "balance", 200i64)?;
            p.point();
            t.abort();
            Ok(())
        });
        let (e, out) = (engine.clone(), reads.clone());
        s.txn(move |_| {
            let mut t = e.begin()?;
            let b = int_prop(&mut t, acct(1), "balance")?;
            t.commit()?;
            out.lock().push(b);
            Ok(())
        });
        s.play(cfg)?;
    } else {
        run_clients(
            cfg,
            |rng| {
                let id = pick(rng, ACCOUNTS);
                let mut t = engine.begin()?;
                match t.update_property(acct(id), "balance", 200i64) {
                    Err(e) if e.is_conflict() => {
                        tally.gave_up.fetch_add(1, Ordering::Relaxed);
                        return Ok(());
                    }
                    r => r?,
                }
                pause(cfg);
                t.abort();
                Ok(())
            },
            |rng| {
                if let Some(b) = read_balance(engine, pick(rng, ACCOUNTS))? {
                    reads.lock().push(b);
                }
                Ok(())
            },
        )?;
    }
    let reads = reads.lock().clone();
    Ok(tally.into_report(AcidTest::G1a, check::g1_check(&reads), reads.len()))
}

/// Intermediate reads: writers set an even balance, then an odd one, then
/// commit.
pub fn g1b_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_balances(engine, ACCOUNTS, "balance", 99)?;
    let reads = Arc::new(Mutex::new(Vec::new()));
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        let e = engine.clone();
        s.txn(move |p| {
            let mut t = e.begin()?;
            t.update_property(acct(1), "balance", 200i64)?;
            p.point();
            t.update_property(acct(1), "balance", 201i64)?;
            t.commit()
        });
        let (e, out) = (engine.clone(), reads.clone());
        s.txn(move |_| {
            let mut t = e.begin()?;
            let b = int_prop(&mut t, acct(1), "balance")?;
            t.commit()?;
            out.lock().push(b);
            Ok(())
        });
        s.play(cfg)?;
    } else {
        let next = AtomicI64::new(50);
        run_clients(
            cfg,
            |rng| {
                let id = pick(rng, ACCOUNTS);
                let even = 2 * next.fetch_add(1, Ordering::Relaxed);
                let r = retry(engine, |t| {
                    t.update_property(acct(id), "balance", even)?;
                    pause(cfg);
                    t.update_property(acct(id), "balance", even + 1)
                })?;
                tally.note(&r);
                Ok(())
            },
            |rng| {
                if let Some(b) = read_balance(engine, pick(rng, ACCOUNTS))? {
                    reads.lock().push(b);
                }
                Ok(())
            },
        )?;
    }
    let reads = reads.lock().clone();
    Ok(tally.into_report(AcidTest::G1b, check::g1_check(&reads), reads.len()))
}

// G1c

/// Circular information flow: each transaction writes its id into one
/// account and reads another.
pub fn g1c_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_balances(engine, ACCOUNTS, "balance", 0)?;
    let results = Arc::new(Mutex::new(Vec::new()));
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        for (mine, theirs) in [(1, 2), (2, 1)] {
            let (e, out) = (engine.clone(), results.clone());
            s.txn(move |p| {
                let mut t = e.begin()?;
                let tid = t.id() as i64;
                t.update_property(acct(mine), "balance", tid)?;
                p.point();
                let r = int_prop(&mut t, acct(theirs), "balance")?;
                t.commit()?;
                out.lock().push((tid, r));
                Ok(())
            });
        }
        s.play(cfg)?;
    } else {
        let rw = AcidConfig {
            read_clients: 0,
            ..cfg.clone()
        };
        run_clients(
            &rw,
            |rng| {
                let (a1, a2) = pick_two(rng, ACCOUNTS);
                let r = retry(engine, |t| {
                    let tid = t.id() as i64;
                    t.update_property(acct(a1), "balance", tid)?;
                    Ok((tid, int_prop(t, acct(a2), "balance")?))
                })?;
                tally.note(&r);
                results.lock().extend(r);
                Ok(())
            },
            |_| Ok(()),
        )?;
    }
    let results = results.lock().clone();
    Ok(tally.into_report(AcidTest::G1c, check::g1c_check(&results), results.len()))
}

// IMP, PMP

/// Item-many-preceders: readers read one balance twice while writers
/// install fresh values.
pub fn imp_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_balances(engine, ACCOUNTS, "balance", 1)?;
    let reads = Arc::new(Mutex::new(Vec::new()));
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        let (e, out) = (engine.clone(), reads.clone());
        s.txn(move |p| {
            let mut t = e.begin()?;
            let first = int_prop(&mut t, acct(1), "balance")?;
            p.point();
            let second = int_prop(&mut t, acct(1), "balance")?;
            t.commit()?;
            out.lock().push((first, second));
            Ok(())
        });
        let e = engine.clone();
        s.txn(move |_| {
            let mut t = e.begin()?;
            t.update_property(acct(1), "balance", 2i64)?;
            t.commit()
        });
        s.play(cfg)?;
    } else {
        let next = AtomicI64::new(2);
        run_clients(
            cfg,
            |rng| {
                let id = pick(rng, ACCOUNTS);
                let v = next.fetch_add(1, Ordering::Relaxed);
                let r = retry(engine, |t| t.update_property(acct(id), "balance", v))?;
                tally.note(&r);
                Ok(())
            },
            |rng| {
                let id = pick(rng, ACCOUNTS);
                let r = retry(engine, |t| {
                    let first = int_prop(t, acct(id), "balance")?;
                    pause(cfg);
                    Ok((first, int_prop(t, acct(id), "balance")?))
                })?;
                reads.lock().extend(r);
                Ok(())
            },
        )?;
    }
    let reads = reads.lock().clone();
    Ok(tally.into_report(AcidTest::Imp, check::repeat_read_check(&reads), reads.len()))
}

fn in_transfers(t: &mut Txn, id: u64) -> EResult<i64> {
    let w = Window::unbounded();
    Ok(
        t.neighbors(acct(id), EdgeKind::Transfer, Direction::In, &w, None)?
            .len() as i64,
    )
}

/// Predicate-many-preceders: readers count incoming transfers twice while
/// writers insert transfers.
pub fn pmp_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed(engine, (1..=ACCOUNTS).map(account).collect())?;
    let reads = Arc::new(Mutex::new(Vec::new()));
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        let (e, out) = (engine.clone(), reads.clone());
        s.txn(move |p| {
            let mut t = e.begin()?;
            let first = in_transfers(&mut t, 1)?;
            p.point();
            let second = in_transfers(&mut t, 1)?;
            t.commit()?;
            out.lock().push((first, second));
            Ok(())
        });
        let e = engine.clone();
        s.txn(move |_| {
            let mut t = e.begin()?;
            t.insert_edge(transfer(2, 1, 1))?;
            t.commit()
        });
        s.play(cfg)?;
    } else {
        let ts = AtomicI64::new(1);
        run_clients(
            cfg,
            |rng| {
                let (a1, a2) = pick_two(rng, ACCOUNTS);
                let at = ts.fetch_add(1, Ordering::Relaxed);
                let r = retry(engine, |t| t.insert_edge(transfer(a1, a2, at)).map(|_| ()))?;
                tally.note(&r);
                Ok(())
            },
            |rng| {
                let id = pick(rng, ACCOUNTS);
                let r = retry(engine, |t| {
                    let first = in_transfers(t, id)?;
                    pause(cfg);
                    Ok((first, in_transfers(t, id)?))
                })?;
                reads.lock().extend(r);
                Ok(())
            },
        )?;
    }
    let reads = reads.lock().clone();
    Ok(tally.into_report(AcidTest::Pmp, check::repeat_read_check(&reads), reads.len()))
}

// OTV, FR

fn cycle_start(c: u64) -> u64 {
    4 * c + 1
}

fn seed_cycles(engine: &Engine) -> Result<()> {
    seed_balances(engine, 4 * CYCLES, "balance", 1)?;
    engine.run(0, |t| {
        for c in 0..CYCLES {
            let s = cycle_start(c);
            for i in 0..4 {
                t.insert_edge(transfer(s + i, s + (i + 1) % 4, 1))?;
            }
        }
        Ok(())
    })?;
    Ok(())
}

/// The accounts on the transfer cycle through `start`, in walk order.
fn cycle_nodes(t: &mut Txn, start: u64) -> EResult<Vec<VertexRef>> {
    let w = Window::unbounded();
    let mut nodes = vec![acct(start)];
    while nodes.len() < 4 {
        let cur = *nodes.last().expect("nonempty");
        let out = t.neighbors(cur, EdgeKind::Transfer, Direction::Out, &w, None)?;
        match out.first() {
            Some(e) if e.dst != acct(start) => nodes.push(e.dst),
            _ => break,
        }
    }
    Ok(nodes)
}

fn cycle_balances(t: &mut Txn, start: u64) -> EResult<Vec<i64>> {
    cycle_nodes(t, start)?
        .into_iter()
        .map(|v| int_prop(t, v, "balance"))
        .collect()
}

fn bump(t: &mut Txn, nodes: &[VertexRef]) -> EResult<()> {
    for &v in nodes {
        let b = int_prop(t, v, "balance")?;
        t.update_property(v, "balance", b + 1)?;
    }
    Ok(())
}

fn cycle_reads(engine: &Engine, cfg: &AcidConfig, tally: &Tally) -> Result<Vec<CycleReads>> {
    seed_cycles(engine)?;
    let reads = Arc::new(Mutex::new(Vec::new()));
    if cfg.scripted {
        // The writer's first half is observed, then the writer aborts.
        let mut s = Script::default();
        let e = engine.clone();
        s.txn(move |p| {
            let mut t = e.begin()?;
            let nodes = cycle_nodes(&mut t, 1)?;
            bump(&mut t, &nodes[..2])?;
            p.point();
            t.abort();
            Ok(())
        });
        let (e, out) = (engine.clone(), reads.clone());
        s.txn(move |p| {
            let mut t = e.begin()?;
            let first = cycle_balances(&mut t, 1)?;
            p.point();
            let second = cycle_balances(&mut t, 1)?;
            t.commit()?;
            out.lock().push((first, second));
            Ok(())
        });
        s.play(cfg)?;
    } else {
        run_clients(
            cfg,
            |rng| {
                let start = cycle_start(rng.gen_range(0..CYCLES));
                let r = retry(engine, |t| {
                    let nodes = cycle_nodes(t, start)?;
                    bump(t, &nodes)
                })?;
                tally.note(&r);
                Ok(())
            },
            |rng| {
                let start = cycle_start(rng.gen_range(0..CYCLES));
                let r = retry(engine, |t| {
                    let first = cycle_balances(t, start)?;
                    pause(cfg);
                    Ok((first, cycle_balances(t, start)?))
                })?;
                reads.lock().extend(r);
                Ok(())
            },
        )?;
    }
    let out = reads.lock().clone();
    Ok(out)
}

/// Observed transaction vanishes: a cycle read twice must not go back in
/// version.
pub fn otv_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    let tally = Tally::default();
    let reads = cycle_reads(engine, cfg, &tally)?;
    Ok(tally.into_report(AcidTest::Otv, check::otv_check(&reads), reads.len()))
}

/// Fractured read: every balance of both cycle reads must be equal.
pub fn fr_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    let tally = Tally::default();
    let reads = cycle_reads(engine, cfg, &tally)?;
    Ok(tally.into_report(AcidTest::Fr, check::fr_check(&reads), reads.len()))
}

// LU

/// Reads the counter, then adds a transfer to a new account and writes the
/// counter back incremented.
fn lu_finish(t: &mut Txn, id: u64, seen: i64, fresh: u64) -> EResult<()> {
    t.insert_vertex(account(fresh))?;
    t.insert_edge(transfer(id, fresh, 1))?;
    t.update_property(acct(id), "numTransferred", seen + 1)
}

/// Lost update: clients count their successful increments; the stored
/// counters must match.
pub fn lu_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed_balances(engine, ACCOUNTS, "numTransferred", 0)?;
    let expected = Arc::new(Mutex::new(BTreeMap::<u64, i64>::new()));
    let fresh = Arc::new(AtomicI64::new(FRESH_IDS));
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        for _ in 0..2 {
            let (e, exp, fresh) = (engine.clone(), expected.clone(), fresh.clone());
            s.txn(move |p| {
                let mut t = e.begin()?;
                let seen = int_prop(&mut t, acct(1), "numTransferred")?;
                p.point();
                let id = fresh.fetch_add(1, Ordering::Relaxed) as u64;
                lu_finish(&mut t, 1, seen, id)?;
                t.commit()?;
                *exp.lock().entry(1).or_default() += 1;
                Ok(())
            });
        }
        s.play(cfg)?;
    } else {
        run_clients(
            cfg,
            |rng| {
                let id = pick(rng, ACCOUNTS);
                let r = retry(engine, |t| {
                    let seen = int_prop(t, acct(id), "numTransferred")?;
                    pause(cfg);
                    let new = fresh.fetch_add(1, Ordering::Relaxed) as u64;
                    lu_finish(t, id, seen, new)
                })?;
                tally.note(&r);
                if r.is_some() {
                    *expected.lock().entry(id).or_default() += 1;
                }
                Ok(())
            },
            |_| Ok(()),
        )?;
    }
    let stored = retry(engine, |t| {
        (1..=ACCOUNTS)
            .map(|id| Ok((id, int_prop(t, acct(id), "numTransferred")?)))
            .collect::<EResult<BTreeMap<u64, i64>>>()
    })?
    .unwrap_or_default();
    let expected = expected.lock().clone();
    Ok(tally.into_report(
        AcidTest::Lu,
        check::lu_check(&stored, &expected),
        stored.len(),
    ))
}

// WS

/// Reads both balances of a pair; false when the withdrawal must abort.
fn ws_guard(t: &mut Txn, a1: u64, a2: u64) -> EResult<bool> {
    let sum = int_prop(t, acct(a1), "balance")? + int_prop(t, acct(a2), "balance")?;
    Ok(sum >= 100)
}

fn ws_take(t: &mut Txn, id: u64) -> EResult<()> {
    let b = int_prop(t, acct(id), "balance")?;
    t.update_property(acct(id), "balance", b - 100)
}

fn ws_scan(engine: &Engine) -> Result<Vec<(u64, i64, u64, i64)>> {
    let rows = retry(engine, |t| t.scan_vertices(VertexKind::Account))?.unwrap_or_default();
    let bal: BTreeMap<u64, i64> = rows
        .iter()
        .map(|v| {
            (
                v.id.0,
                v.get("balance").and_then(Value::as_int).unwrap_or(0),
            )
        })
        .collect();
    Ok(bal
        .iter()
        .filter(|(id, _)| *id % 2 == 1)
        .filter_map(|(&a1, &b1)| bal.get(&(a1 + 1)).map(|&b2| (a1, b1, a1 + 1, b2)))
        .collect())
}

/// Write skew: withdrawals keep each pair's total positive only if they
/// serialize.
pub fn ws_run(engine: &Engine, cfg: &AcidConfig) -> Result<AnomalyReport> {
    seed(
        engine,
        (0..PAIRS)
            .flat_map(|k| {
                [
                    account(2 * k + 1).with("balance", 70i64),
                    account(2 * k + 2).with("balance", 80i64),
                ]
            })
            .collect(),
    )?;
    let tally = Tally::default();
    if cfg.scripted {
        let mut s = Script::default();
        for side in [1, 2] {
            let e = engine.clone();
            s.txn(move |p| {
                let mut t = e.begin()?;
                if !ws_guard(&mut t, 1, 2)? {
                    t.abort();
                    return Ok(());
                }
                p.point();
                ws_take(&mut t, side)?;
                t.commit()
            });
        }
        s.play(cfg)?;
    } else {
        run_clients(
            cfg,
            |rng| {
                let k = rng.gen_range(0..PAIRS);
                let (a1, a2) = (2 * k + 1, 2 * k + 2);
                let side = if rng.gen_bool(0.5) { a1 } else { a2 };
                let r = retry(engine, |t| {
                    if !ws_guard(t, a1, a2)? {
                        return Ok(false);
                    }
                    pause(cfg);
                    ws_take(t, side)?;
                    Ok(true)
                })?;
                tally.note(&r);
                Ok(())
            },
            |_| Ok(()),
        )?;
    }
    let rows = ws_scan(engine)?;
    Ok(tally.into_report(AcidTest::Ws, check::ws_check(&rows), rows.len()))
}
