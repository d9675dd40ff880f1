use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

use crate::error::{EngineError, Result};
use crate::schema::{Direction, EdgeKind, VertexKind, VertexRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum LockKey {
    /// A vertex's existence and properties. Locked even when absent.
    Vertex(VertexRef),
    /// One adjacency list; also covers properties of the edges in it.
    Adj(VertexRef, EdgeKind, Direction),
    /// Membership of a vertex kind, for scans.
    KindSet(VertexKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LockMode {
    Shared,
    IntentExclusive,
    Exclusive,
}

impl LockMode {
    fn compatible(self, other: LockMode) -> bool {
        use LockMode::*;
        matches!(
            (self, other),
            (Shared, Shared) | (IntentExclusive, IntentExclusive)
        )
    }

    fn covers(self, want: LockMode) -> bool {
        self == LockMode::Exclusive || self == want
    }

    fn combine(self, want: LockMode) -> LockMode {
        if self.covers(want) {
            self
        } else {
            LockMode::Exclusive
        }
    }
}

#[derive(Default)]
struct Table {
    locks: HashMap<LockKey, HashMap<u64, LockMode>>,
    held: HashMap<u64, Vec<LockKey>>,
    waiting: HashMap<u64, (LockKey, LockMode)>,
    doomed: HashSet<u64>,
}

impl Table {
    fn blockers(&self, txn: u64, key: &LockKey, want: LockMode) -> Vec<u64> {
        self.locks
            .get(key)
            .map(|h| {
                h.iter()
                    .filter(|(t, m)| **t != txn && !m.compatible(want))
                    .map(|(t, _)| *t)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Returns the members of a wait-for cycle through `start`, if any.
    fn cycle_through(&self, start: u64) -> Option<Vec<u64>> {
        let mut stack = vec![(start, 0usize)];
        let mut path = vec![start];
        let mut seen = HashSet::new();
        seen.insert(start);
        let mut succ_cache: HashMap<u64, Vec<u64>> = HashMap::new();
        while let Some((node, idx)) = stack.pop() {
            let succ = succ_cache
                .entry(node)
                .or_insert_with(|| match self.waiting.get(&node) {
                    Some((k, m)) => self.blockers(node, k, *m),
                    None => Vec::new(),
                })
                .clone();
            if idx < succ.len() {
                stack.push((node, idx + 1));
                let next = succ[idx];
                if next == start {
                    return Some(path.clone());
                }
                if seen.insert(next) {
                    stack.push((next, 0));
                    path.push(next);
                }
            } else {
                path.pop();
            }
        }
        None
    }
}

pub(crate) struct LockManager {
    table: Mutex<Table>,
    cv: Condvar,
    timeout: Duration,
}

impl LockManager {
    pub fn new(timeout: Duration) -> Self {
        LockManager {
            table: Mutex::new(Table::default()),
            cv: Condvar::new(),
            timeout,
        }
    }

    /// Blocks until granted. Returns true if the lock was not already held.
    pub fn acquire(&self, txn: u64, key: LockKey, mode: LockMode) -> Result<bool> {
        let deadline = Instant::now() + self.timeout;
        let mut t = self.table.lock();
        loop {
            if t.doomed.remove(&txn) {
                t.waiting.remove(&txn);
                return Err(EngineError::SerializationConflict(txn));
            }
            let cur = t.locks.get(&key).and_then(|h| h.get(&txn)).copied();
            if let Some(c) = cur {
                if c.covers(mode) {
                    t.waiting.remove(&txn);
                    return Ok(false);
                }
            }
            let want = cur.map_or(mode, |c| c.combine(mode));
            if t.blockers(txn, &key, want).is_empty() {
                t.waiting.remove(&txn);
                t.locks.entry(key).or_default().insert(txn, want);
                if cur.is_none() {
                    t.held.entry(txn).or_default().push(key);
                }
                return Ok(cur.is_none());
            }
            t.waiting.insert(txn, (key, want));
            if let Some(cycle) = t.cycle_through(txn) {
                let victim = *cycle.iter().max().expect("cycle is non-empty");
                if victim == txn {
                    t.waiting.remove(&txn);
                    return Err(EngineError::SerializationConflict(txn));
                }
                t.doomed.insert(victim);
                self.cv.notify_all();
            }
            let now = Instant::now();
            if now >= deadline {
                t.waiting.remove(&txn);
                return Err(EngineError::LockTimeout(txn));
            }
            let wait = (deadline - now).min(Duration::from_millis(25));
            self.cv.wait_for(&mut t, wait);
        }
    }

    pub fn release(&self, txn: u64, key: LockKey) {
        let mut t = self.table.lock();
        if let Some(h) = t.locks.get_mut(&key) {
            h.remove(&txn);
            if h.is_empty() {
                t.locks.remove(&key);
            }
        }
        if let Some(list) = t.held.get_mut(&txn) {
            if let Some(pos) = list.iter().rposition(|k| *k == key) {
                list.swap_remove(pos);
            }
        }
        self.cv.notify_all();
    }

    pub fn release_all(&self, txn: u64) {
        let mut t = self.table.lock();
        for key in t.held.remove(&txn).unwrap_or_default() {
            if let Some(h) = t.locks.get_mut(&key) {
                h.remove(&txn);
                if h.is_empty() {
                    t.locks.remove(&key);
                }
            }
        }
        t.waiting.remove(&txn);
        t.doomed.remove(&txn);
        self.cv.notify_all();
    }

    #[cfg(test)]
    pub fn held_count(&self, txn: u64) -> usize {
        self.table.lock().held.get(&txn).map_or(0, Vec::len)
    }
}
