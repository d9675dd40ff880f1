//! Base graph plus write stream for the consistency and durability tests.

use finbench_core::{Money, Timestamp};
use finbench_engine::{EdgeKind, EdgeRecord, VertexKind, VertexRecord, VertexRef};
use finbench_workloads::Write;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clients::account;

#[derive(Debug, Clone, Default)]
pub struct Workload {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub writes: Vec<Write>,
}

fn money(rng: &mut ChaCha8Rng) -> Money {
    Money::from_cents(rng.gen_range(100..100_000))
}

impl Workload {
    /// `accounts` accounts (every fourth a card), a loan per five accounts
    /// with its deposit, and `writes` random TW12-15 operations that all
    /// apply cleanly.
    pub fn synthetic(seed: u64, accounts: u64, writes: usize) -> Workload {
        let accounts = accounts.max(4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let card = |id: u64| id.is_multiple_of(4);
        let vertices_a = (1..=accounts).map(|id| {
            let v = account(id);
            if card(id) {
                v.with("type", "card")
            } else {
                v
            }
        });
        let loans = accounts.div_ceil(5);
        let mut vertices: Vec<VertexRecord> = vertices_a.collect();
        let mut edges = Vec::new();
        let t0 = Timestamp::from_ymd(2022, 1, 1).0;
        for l in 1..=loans {
            let amount = Money::units(rng.gen_range(1_000..50_000));
            vertices.push(
                VertexRecord::new(VertexKind::Loan, l)
                    .with("loanAmount", amount)
                    .with("balance", amount),
            );
            let to = rng.gen_range(1..=accounts);
            edges.push(
                EdgeRecord::new(
                    EdgeKind::Deposit,
                    VertexRef::loan(l),
                    VertexRef::account(to),
                    Timestamp(t0 + l as i64),
                )
                .with_amount(money(&mut rng)),
            );
        }
        let cards: Vec<u64> = (1..=accounts).filter(|&id| card(id)).collect();
        let mut out = Vec::with_capacity(writes);
        for i in 0..writes {
            let time = Timestamp(t0 + 1_000 * (i as i64 + 1));
            let amount = money(&mut rng);
            let a1 = rng.gen_range(1..=accounts);
            let w = match rng.gen_range(0..10) {
                0 => Write::Withdraw {
                    account_id1: a1,
                    account_id2: cards[rng.gen_range(0..cards.len())],
                    time,
                    amount,
                },
                1 => Write::Deposit {
                    loan_id: rng.gen_range(1..=loans),
                    account_id: a1,
                    time,
                    amount,
                },
                2 => Write::Repay {
                    account_id: a1,
                    loan_id: rng.gen_range(1..=loans),
                    time,
                    amount,
                },
                _ => Write::Transfer {
                    account_id1: a1,
                    account_id2: rng.gen_range(1..=accounts),
                    time,
                    amount,
                },
            };
            out.push(w);
        }
        Workload {
            vertices,
            edges,
            writes: out,
        }
    }
}
