//! Cutting a dataset into bulk-loaded initial data and an update stream.

use std::collections::{BTreeSet, HashMap};

use finbench_core::Timestamp;
use finbench_workloads::{format_time, Write};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DatagenError, Result};
use crate::model::Dataset;

/// One scheduled write. Ordered by `(time, seq)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub seq: u64,
    pub time: Timestamp,
    pub op: Write,
}

impl UpdateEvent {
    /// `time|seq|TWn|field|...`
    pub fn to_line(&self) -> String {
        let mut parts = vec![format_time(self.time), self.seq.to_string(), self.op.name()];
        parts.extend(self.op.fields());
        parts.join("|")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateStream {
    pub events: Vec<UpdateEvent>,
}

impl UpdateStream {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Inserts only (TW1..TW16).
    pub fn insert_count(&self) -> usize {
        self.events.iter().filter(|e| e.op.number() <= 16).count()
    }

    pub fn sort(&mut self) {
        self.events.sort_by_key(|e| (e.time, e.seq));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub initial: Dataset,
    pub stream: UpdateStream,
    /// Latest timestamp in the initial data.
    pub cutoff: Timestamp,
}

/// Keeps the first `fraction` of events (by time) as initial data. The rest
/// become the update stream, followed by `delete_share` of delete and block
/// operations placed inside the stream's time range.
pub fn split(ds: &Dataset, fraction: f64, delete_share: f64, seed: u64) -> Result<Split> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(DatagenError::Config(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    if ds.is_empty() {
        return Ok(Split {
            initial: Dataset::default(),
            stream: UpdateStream::default(),
            cutoff: Timestamp(0),
        });
    }
    let n = ds.len();
    let keep = ((n as f64 * fraction).ceil() as usize).clamp(1, n);
    let mut cut = keep - 1;
    // never split events that share a timestamp
    while cut + 1 < n && ds.events[cut + 1].time == ds.events[cut].time {
        cut += 1;
    }
    let cutoff = ds.events[cut].time;
    let initial = Dataset {
        events: ds.events[..=cut].to_vec(),
    };
    let mut stream = UpdateStream {
        events: ds.events[cut + 1..]
            .iter()
            .enumerate()
            .map(|(i, e)| UpdateEvent {
                seq: i as u64,
                time: e.time,
                op: e.op.clone(),
            })
            .collect(),
    };
    let extra = (stream.len() as f64 * delete_share).round() as usize;
    if extra > 0 {
        let ops = deletes(ds, &stream, extra, seed);
        let base = stream.len() as u64;
        stream.events.extend(
            ops.into_iter()
                .enumerate()
                .map(|(i, (time, op))| UpdateEvent {
                    seq: base + i as u64,
                    time,
                    op,
                }),
        );
        stream.sort();
    }
    Ok(Split {
        initial,
        stream,
        cutoff,
    })
}

/// TW17..TW19 at random stream times. A deleted account, and every loan
/// it touches, is never referenced by a later event.
fn deletes(
    ds: &Dataset,
    stream: &UpdateStream,
    count: usize,
    seed: u64,
) -> Vec<(Timestamp, Write)> {
    use Write::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(17);
    let (Some(lo), Some(hi)) = (stream.events.first(), stream.events.last()) else {
        return Vec::new();
    };
    let (lo, hi) = (lo.time.0, hi.time.0);

    let mut born_account: Vec<(i64, u64)> = Vec::new();
    let mut born_person: Vec<(i64, u64)> = Vec::new();
    let mut last_account: HashMap<u64, i64> = HashMap::new();
    let mut last_loan: HashMap<u64, i64> = HashMap::new();
    let mut loans_of: HashMap<u64, BTreeSet<u64>> = HashMap::new();
    for e in &ds.events {
        let t = e.time.0;
        match &e.op {
            AddPerson { person_id, .. } => born_person.push((t, *person_id)),
            AddPersonAccount { account_id, .. } | AddCompanyAccount { account_id, .. } => {
                born_account.push((t, *account_id));
                last_account.insert(*account_id, t);
            }
            AddPersonLoan { loan_id, .. } | AddCompanyLoan { loan_id, .. } => {
                last_loan.insert(*loan_id, t);
            }
            Transfer {
                account_id1,
                account_id2,
                ..
            }
            | Withdraw {
                account_id1,
                account_id2,
                ..
            } => {
                last_account.insert(*account_id1, t);
                last_account.insert(*account_id2, t);
            }
            Repay {
                account_id,
                loan_id,
                ..
            }
            | Deposit {
                loan_id,
                account_id,
                ..
            } => {
                last_account.insert(*account_id, t);
                last_loan.insert(*loan_id, t);
                loans_of.entry(*account_id).or_default().insert(*loan_id);
            }
            SignIn { account_id, .. } => {
                last_account.insert(*account_id, t);
            }
            _ => {}
        }
    }
    // time after which deleting the account disturbs nothing
    let quiet = |a: u64| -> i64 {
        let mut q = last_account.get(&a).copied().unwrap_or(i64::MIN);
        for l in loans_of.get(&a).into_iter().flatten() {
            q = q.max(last_loan.get(l).copied().unwrap_or(i64::MIN));
        }
        q
    };

    let mut times: Vec<i64> = (0..count).map(|_| rng.gen_range(lo..=hi)).collect();
    times.sort_unstable();
    let mut deleted: BTreeSet<u64> = BTreeSet::new();
    let mut out = Vec::new();
    for t in times {
        let op = match rng.gen_range(0..3) {
            0 => {
                let cands: Vec<u64> = born_account
                    .iter()
                    .filter(|(b, a)| *b < t && !deleted.contains(a) && quiet(*a) < t)
                    .map(|(_, a)| *a)
                    .collect();
                cands.choose(&mut rng).map(|&a| {
                    deleted.insert(a);
                    DeleteAccount { account_id: a }
                })
            }
            1 => {
                let cands: Vec<u64> = born_account
                    .iter()
                    .filter(|(b, a)| *b < t && !deleted.contains(a))
                    .map(|(_, a)| *a)
                    .collect();
                cands
                    .choose(&mut rng)
                    .map(|&a| BlockAccount { account_id: a })
            }
            _ => {
                let cands: Vec<u64> = born_person
                    .iter()
                    .filter(|(b, _)| *b < t)
                    .map(|(_, p)| *p)
                    .collect();
                cands
                    .choose(&mut rng)
                    .map(|&p| BlockPerson { person_id: p })
            }
        };
        if let Some(op) = op {
            out.push((Timestamp(t), op));
        }
    }
    out
}
