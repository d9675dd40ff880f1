mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use common::*;
use finbench_engine::{
    EdgeKind, Engine, EngineConfig, EngineError, IsolationLevel, Value, VertexKind, VertexRef,
};
use proptest::prelude::*;

const SER: IsolationLevel = IsolationLevel::Serializable;

fn open(path: &Path) -> Engine {
    Engine::open(EngineConfig::durable(SER, path)).unwrap()
}

fn counter(e: &Engine, id: u64) -> Option<i64> {
    let mut t = e.begin().unwrap();
    t.get_vertex(VertexKind::Account, id)
        .unwrap()
        .map(|v| v.get("n").and_then(Value::as_int).unwrap_or(-1))
}

#[test]
fn hundred_commits_survive_crash() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wal.log");
    let e = open(&path);
    for i in 1..=100u64 {
        e.run(0, |t| {
            t.insert_vertex(account(i, "normal").with("n", i as i64))
                .map(|_| ())
        })
        .unwrap();
    }
    e.crash();
    assert_eq!(e.begin().err(), Some(EngineError::Crashed));
    let r = open(&path);
    assert_eq!(r.vertex_count(), 100);
    assert_eq!(r.recovery_info().replayed_txns, 100);
    assert_eq!(counter(&r, 57), Some(57));
}

#[test]
fn uncommitted_work_is_lost_on_crash() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wal.log");
    let e = open(&path);
    e.run(0, |t| t.insert_vertex(account(1, "normal")).map(|_| ()))
        .unwrap();
    let mut t = e.begin().unwrap();
    t.insert_vertex(account(2, "normal")).unwrap();
    e.crash();
    drop(t);
    let r = open(&path);
    assert_eq!(r.vertex_count(), 1);
    assert!(counter(&r, 2).is_none());
}

#[test]
fn checkpoint_truncates_log_and_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wal.log");
    let e = open(&path);
    for i in 1..=10u64 {
        e.run(0, |t| t.insert_vertex(account(i, "normal")).map(|_| ()))
            .unwrap();
    }
    // an in-flight transaction must not leak into the snapshot
    let mut open_txn = e.begin().unwrap();
    open_txn.insert_vertex(account(99, "normal")).unwrap();
    open_txn
        .update_property(VertexRef::account(1), "n", 5i64)
        .unwrap();
    e.checkpoint().unwrap();
    assert_eq!(fs::metadata(&path).unwrap().len(), 0);
    open_txn.abort();
    e.run(0, |t| {
        t.insert_edge(money_edge(
            EdgeKind::Transfer,
            VertexRef::account(1),
            VertexRef::account(2),
            5,
            3,
        ))
        .map(|_| ())
    })
    .unwrap();
    let digest = e.state_digest();
    e.crash();
    let r = open(&path);
    assert_eq!(r.state_digest(), digest);
    assert_eq!(r.recovery_info().snapshot_seq, 10);
    assert_eq!(r.recovery_info().replayed_txns, 1);
    // edge ids continue after the recovered counter
    let id = r
        .run(0, |t| {
            t.insert_edge(money_edge(
                EdgeKind::Transfer,
                VertexRef::account(2),
                VertexRef::account(1),
                6,
                3,
            ))
        })
        .unwrap();
    assert_eq!(id.0, 2);
}

#[test]
fn torn_tail_keeps_exact_committed_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wal.log");
    let e = open(&path);
    let mut boundaries = vec![0u64];
    for i in 1..=4u64 {
        e.run(0, |t| t.insert_vertex(account(i, "normal")).map(|_| ()))
            .unwrap();
        boundaries.push(fs::metadata(&path).unwrap().len());
    }
    e.crash();
    let full = fs::read(&path).unwrap();
    let cut_path = dir.path().join("cut.log");
    for cut in boundaries[2]..=full.len() as u64 {
        fs::write(&cut_path, &full[..cut as usize]).unwrap();
        let r = open(&cut_path);
        let expect = boundaries.iter().filter(|b| **b <= cut).count() - 1;
        assert_eq!(r.vertex_count(), expect, "cut at {cut}");
        // the torn bytes are gone and new commits append cleanly
        r.run(0, |t| t.insert_vertex(account(50, "normal")).map(|_| ()))
            .unwrap();
        r.crash();
        assert_eq!(open(&cut_path).vertex_count(), expect + 1);
    }
}

#[test]
fn corruption_mid_log_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wal.log");
    let e = open(&path);
    let mut first = 0;
    for i in 1..=3u64 {
        e.run(0, |t| t.insert_vertex(account(i, "normal")).map(|_| ()))
            .unwrap();
        if i == 1 {
            first = fs::metadata(&path).unwrap().len() as usize;
        }
    }
    e.crash();
    let mut bytes = fs::read(&path).unwrap();
    bytes[first + 12] ^= 0x5a;
    fs::write(&path, bytes).unwrap();
    match Engine::open(EngineConfig::durable(SER, &path)) {
        Err(EngineError::Recovery { last_valid_seq, .. }) => assert_eq!(last_valid_seq, 1),
        other => panic!("expected recovery error, got {other:?}"),
    }
}

#[derive(Debug, Clone)]
enum Op {
    Insert(u64),
    Set(u64, i64),
    Delete(u64),
    Transfer(u64, u64, i64),
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        (1u64..6).prop_map(Op::Insert),
        (1u64..6, 0i64..100).prop_map(|(a, v)| Op::Set(a, v)),
        (1u64..6).prop_map(Op::Delete),
        (1u64..6, 1u64..6, 1i64..50).prop_map(|(a, b, t)| Op::Transfer(a, b, t)),
    ]
}

#[derive(Default, Clone, PartialEq, Debug)]
struct Model {
    accounts: BTreeMap<u64, Option<i64>>,
    transfers: Vec<(u64, u64, i64)>,
}

impl Model {
    /// Applies a whole transaction or nothing, mirroring engine errors.
    fn apply_txn(&mut self, ops: &[Op]) -> bool {
        let mut next = self.clone();
        for op in ops {
            match *op {
                Op::Insert(a) => {
                    if next.accounts.contains_key(&a) {
                        return false;
                    }
                    next.accounts.insert(a, None);
                }
                Op::Set(a, v) => {
                    if !next.accounts.contains_key(&a) {
                        return false;
                    }
                    next.accounts.insert(a, Some(v));
                }
                Op::Delete(a) => {
                    if next.accounts.remove(&a).is_none() {
                        return false;
                    }
                    next.transfers.retain(|(s, d, _)| *s != a && *d != a);
                }
                Op::Transfer(s, d, t) => {
                    if !next.accounts.contains_key(&s) || !next.accounts.contains_key(&d) {
                        return false;
                    }
                    next.transfers.push((s, d, t));
                }
            }
        }
        *self = next;
        true
    }
}

fn run_txn(e: &Engine, ops: &[Op], commit: bool) -> bool {
    let mut t = e.begin().unwrap();
    for op in ops {
        let r = match *op {
            Op::Insert(a) => t.insert_vertex(account(a, "normal")).map(|_| ()),
            Op::Set(a, v) => t.update_property(VertexRef::account(a), "n", v),
            Op::Delete(a) => t.delete_vertex_cascade(VertexKind::Account, a).map(|_| ()),
            Op::Transfer(s, d, ts) => t
                .insert_edge(money_edge(
                    EdgeKind::Transfer,
                    VertexRef::account(s),
                    VertexRef::account(d),
                    ts,
                    1,
                ))
                .map(|_| ()),
        };
        if r.is_err() {
            t.abort();
            return false;
        }
    }
    if commit {
        t.commit().unwrap();
        true
    } else {
        t.abort();
        false
    }
}

fn observe(e: &Engine) -> Model {
    let (vs, es) = e.export();
    let mut m = Model::default();
    for v in vs {
        m.accounts
            .insert(v.id.0, v.get("n").and_then(Value::as_int));
    }
    let mut t: Vec<_> = es
        .iter()
        .map(|x| (x.src.id.0, x.dst.id.0, x.timestamp.0))
        .collect();
    t.sort();
    m.transfers = t;
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn recovered_state_equals_serial_replay_of_commits(
        txns in prop::collection::vec((prop::collection::vec(op_strategy(), 1..5), any::<bool>(), 0u8..10), 1..25)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wal.log");
        let mut e = open(&path);
        let mut model = Model::default();
        for (ops, commit, action) in &txns {
            let mut trial = model.clone();
            let ok = trial.apply_txn(ops);
            let committed = run_txn(&e, ops, *commit);
            prop_assert_eq!(committed, ok && *commit);
            if committed {
                model = trial;
            }
            match action {
                0 => e.checkpoint().unwrap(),
                1 => {
                    e.crash();
                    e = open(&path);
                }
                _ => {}
            }
        }
        e.crash();
        let r = open(&path);
        model.transfers.sort();
        prop_assert_eq!(observe(&r), model);
    }
}
