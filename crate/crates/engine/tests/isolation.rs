mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use common::*;
use finbench_engine::{Engine, IsolationLevel, Txn, VertexRef};
use parking_lot::Mutex;
use proptest::prelude::*;

#[derive(Debug, Clone, Copy)]
enum Step {
    Read(u64),
    /// Sets the item to (sum of this txn's reads so far) + constant.
    Write(u64, i64),
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (1u64..5).prop_map(Step::Read),
        (1u64..5, 1i64..10).prop_map(|(i, c)| Step::Write(i, c)),
    ]
}

fn seed(e: &Engine) {
    e.run(0, |t| {
        for i in 1..5 {
            t.insert_vertex(account(i, "normal").with("n", 0i64))?;
        }
        Ok(())
    })
    .unwrap();
}

fn get(t: &mut Txn, i: u64) -> finbench_engine::Result<i64> {
    Ok(t.get_property(VertexRef::account(i), "n")?
        .and_then(|v| v.as_int())
        .unwrap_or(0))
}

/// Executes one transaction, returning its reads if it committed.
fn exec(e: &Engine, steps: &[Step], pause_us: &[u64]) -> Option<Vec<i64>> {
    let mut t = e.begin().ok()?;
    let mut reads = Vec::new();
    for (k, s) in steps.iter().enumerate() {
        thread::sleep(Duration::from_micros(pause_us[k % pause_us.len()]));
        match *s {
            Step::Read(i) => reads.push(get(&mut t, i).ok()?),
            Step::Write(i, c) => {
                let v = reads.iter().sum::<i64>() + c;
                t.update_property(VertexRef::account(i), "n", v).ok()?;
            }
        }
    }
    t.commit().ok()?;
    Some(reads)
}

/// Serial model run of transactions in the given order.
fn serial(order: &[&Vec<Step>]) -> ([i64; 5], Vec<Vec<i64>>) {
    let mut state = [0i64; 5];
    let mut all_reads = Vec::new();
    for steps in order {
        let mut reads = Vec::new();
        for s in steps.iter() {
            match *s {
                Step::Read(i) => reads.push(state[i as usize]),
                Step::Write(i, c) => state[i as usize] = reads.iter().sum::<i64>() + c,
            }
        }
        all_reads.push(reads);
    }
    (state, all_reads)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn serializable_outcome_matches_some_serial_order(
        txns in prop::collection::vec(prop::collection::vec(step(), 1..4), 2..5),
        pauses in prop::collection::vec(0u64..1500, 1..4),
    ) {
        let e = Engine::volatile(IsolationLevel::Serializable);
        seed(&e);
        let results: Vec<Option<Vec<i64>>> = thread::scope(|s| {
            let hs: Vec<_> = txns
                .iter()
                .map(|steps| {
                    let e = e.clone();
                    let p = pauses.clone();
                    s.spawn(move || exec(&e, steps, &p))
                })
                .collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let committed: Vec<(usize, &Vec<i64>)> = results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|x| (i, x)))
            .collect();
        let mut t = e.begin().unwrap();
        let mut fin = [0i64; 5];
        for i in 1..5u64 {
            fin[i as usize] = get(&mut t, i).unwrap();
        }
        let ok = permutations(committed.len()).into_iter().any(|perm| {
            let order: Vec<&Vec<Step>> = perm.iter().map(|&k| &txns[committed[k].0]).collect();
            let (state, reads) = serial(&order);
            state == fin
                && perm
                    .iter()
                    .zip(reads.iter())
                    .all(|(&k, r)| r == committed[k].1)
        });
        prop_assert!(ok, "no serial order explains final state {:?}", fin);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn read_committed_reads_only_committed_values(
        writers in prop::collection::vec((prop::collection::btree_set(1u64..4, 1..3), any::<bool>()), 1..5),
        pause in 0u64..800,
    ) {
        let e = Engine::volatile(IsolationLevel::ReadCommitted);
        seed(&e);
        let committed = Arc::new(Mutex::new(BTreeSet::new()));
        let observed = Arc::new(Mutex::new(Vec::new()));
        thread::scope(|s| {
            for (w, (items, commit)) in writers.iter().enumerate() {
                let e = e.clone();
                let committed = committed.clone();
                s.spawn(move || {
                    let tag = (w as i64 + 1) * 10;
                    let mut t = e.begin().unwrap();
                    for i in items {
                        if t.update_property(VertexRef::account(*i), "n", tag + 1).is_err() {
                            return;
                        }
                    }
                    thread::sleep(Duration::from_micros(pause));
                    for i in items {
                        if t.update_property(VertexRef::account(*i), "n", tag + 2).is_err() {
                            return;
                        }
                    }
                    if *commit {
                        if t.commit().is_ok() {
                            committed.lock().insert(tag + 2);
                        }
                    } else {
                        t.abort();
                    }
                });
            }
            for _ in 0..2 {
                let e = e.clone();
                let observed = observed.clone();
                s.spawn(move || {
                    for _ in 0..20 {
                        let mut t = e.begin().unwrap();
                        for i in 1..4 {
                            if let Ok(v) = get(&mut t, i) {
                                observed.lock().push(v);
                            }
                        }
                        drop(t);
                        thread::sleep(Duration::from_micros(pause / 4));
                    }
                });
            }
        });
        let committed = committed.lock();
        for v in observed.lock().iter() {
            prop_assert!(*v == 0 || committed.contains(v), "dirty value {} observed", v);
        }
    }
}
