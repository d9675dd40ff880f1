//! Anomaly checks over recorded client observations. Each returns one
//! evidence line per violation.

use std::collections::{BTreeMap, BTreeSet};

/// Entity counts from a full scan of the Account vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub num_accounts: i64,
    pub num_names: i64,
    pub num_transferred: i64,
}

pub fn atomicity_check(committed: Counts, final_state: Counts) -> Vec<String> {
    if committed == final_state {
        Vec::new()
    } else {
        vec![format!(
            "committed {committed:?} but scan found {final_state:?}"
        )]
    }
}

/// `[a1, transfer, a2]` version histories of one account pair.
pub type G0Histories = [Vec<i64>; 3];

/// Drops ids missing from any list, then requires the lists to agree.
pub fn g0_check(pairs: &[G0Histories]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, h) in pairs.iter().enumerate() {
        let common: BTreeSet<i64> = h[0]
            .iter()
            .copied()
            .filter(|x| h[1].contains(x) && h[2].contains(x))
            .collect();
        let pruned: Vec<Vec<i64>> = h
            .iter()
            .map(|l| l.iter().copied().filter(|x| common.contains(x)).collect())
            .collect();
        if pruned[0] != pruned[1] || pruned[1] != pruned[2] {
            out.push(format!(
                "pair {i}: versionHistory a1 {:?}, transfer {:?}, a2 {:?}",
                h[0], h[1], h[2]
            ));
        }
    }
    out
}

/// Every observed balance must be odd.
pub fn g1_check(reads: &[i64]) -> Vec<String> {
    reads
        .iter()
        .enumerate()
        .filter(|(_, b)| *b % 2 == 0)
        .map(|(i, b)| format!("read {i}: balance {b} is even"))
        .collect()
}

/// `(txn id, balance read)` results. A pair of transactions that each read
/// the other's write is circular information flow.
pub fn g1c_check(results: &[(i64, i64)]) -> Vec<String> {
    let read_by: BTreeMap<i64, BTreeSet<i64>> =
        results.iter().fold(BTreeMap::new(), |mut m, &(t, r)| {
            m.entry(t).or_default().insert(r);
            m
        });
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &(a, b) in results {
        if a == b || seen.contains(&(a.min(b), a.max(b))) {
            continue;
        }
        if read_by.get(&b).is_some_and(|s| s.contains(&a)) {
            seen.insert((a.min(b), a.max(b)));
            out.push(format!("T{a} read T{b} and T{b} read T{a}"));
        }
    }
    out
}

/// `(firstRead, secondRead)` pairs from one transaction must agree. Used by
/// IMP (item reads) and PMP (predicate counts).
pub fn repeat_read_check(reads: &[(i64, i64)]) -> Vec<String> {
    reads
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, (a, b))| format!("read {i}: firstRead {a}, secondRead {b}"))
        .collect()
}

/// Two reads of one cycle's balances.
pub type CycleReads = (Vec<i64>, Vec<i64>);

/// The largest balance of the first read must not exceed the smallest of
/// the second.
pub fn otv_check(reads: &[CycleReads]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, (first, second)) in reads.iter().enumerate() {
        let (Some(max), Some(min)) = (first.iter().max(), second.iter().min()) else {
            continue;
        };
        if max > min {
            out.push(format!(
                "read {i}: firstRead {first:?} has {max} > {min} in secondRead {second:?}"
            ));
        }
    }
    out
}

/// All balances across both reads must be equal.
pub fn fr_check(reads: &[CycleReads]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, (first, second)) in reads.iter().enumerate() {
        let mut all = first.iter().chain(second);
        if let Some(x) = all.next() {
            if all.any(|y| y != x) {
                out.push(format!(
                    "read {i}: firstRead {first:?}, secondRead {second:?}"
                ));
            }
        }
    }
    out
}

/// Stored counter per account against the sum of successful client
/// increments. Accounts missing on either side count as zero.
pub fn lu_check(stored: &BTreeMap<u64, i64>, expected: &BTreeMap<u64, i64>) -> Vec<String> {
    let ids: BTreeSet<u64> = stored.keys().chain(expected.keys()).copied().collect();
    ids.into_iter()
        .filter_map(|id| {
            let s = stored.get(&id).copied().unwrap_or(0);
            let e = expected.get(&id).copied().unwrap_or(0);
            (s != e).then(|| format!("account {id}: numTransferred {s}, expected {e}"))
        })
        .collect()
}

/// `(a1 id, a1 balance, a2 id, a2 balance)` rows; each pair must sum above
/// zero.
pub fn ws_check(pairs: &[(u64, i64, u64, i64)]) -> Vec<String> {
    pairs
        .iter()
        .filter(|(_, b1, _, b2)| b1 + b2 <= 0)
        .map(|(a1, b1, a2, b2)| {
            format!("accounts {a1} and {a2}: balances {b1} + {b2} = {}", b1 + b2)
        })
        .collect()
}

/// `(account, stored balance, balance recomputed from edges)` in cents.
pub fn balance_check(rows: &[(u64, i64, i64)]) -> Vec<String> {
    rows.iter()
        .filter(|(_, s, r)| s != r)
        .map(|(id, s, r)| format!("account {id}: stored balance {s}, edges give {r}"))
        .collect()
}
