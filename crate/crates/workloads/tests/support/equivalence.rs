//! Random small graphs loaded both into an engine and into the brute-force
//! oracle, and a check that every read query agrees on them. Truncation
//! limits are high enough to never cut anything.

use std::collections::BTreeSet;

use finbench_core::{Money, Rounded3, Timestamp, TruncationOrder, TruncationSpec, Window};
use finbench_engine::{
    EdgeKind, EdgeRecord, Engine, IsolationLevel, VertexKind, VertexRecord, VertexRef,
};
use finbench_oracle as oracle;
use finbench_oracle::Node;
use finbench_workloads::read::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub engine: Engine,
    pub g: oracle::Graph,
    pub accounts: Vec<u64>,
    pub persons: Vec<u64>,
    pub loans: Vec<u64>,
}

fn node(v: VertexRef) -> Node {
    let id = v.id.0;
    match v.kind {
        VertexKind::Person => Node::Person(id),
        VertexKind::Company => Node::Company(id),
        VertexKind::Account => Node::Account(id),
        VertexKind::Loan => Node::Loan(id),
        VertexKind::Medium => Node::Medium(id),
    }
}

fn okind(k: EdgeKind) -> oracle::Kind {
    use oracle::Kind as K;
    match k {
        EdgeKind::Transfer => K::Transfer,
        EdgeKind::Withdraw => K::Withdraw,
        EdgeKind::Deposit => K::Deposit,
        EdgeKind::Repay => K::Repay,
        EdgeKind::SignIn => K::SignIn,
        EdgeKind::Invest => K::Invest,
        EdgeKind::Apply => K::Apply,
        EdgeKind::Guarantee => K::Guarantee,
        EdgeKind::Own => K::Own,
    }
}

/// At most 30 vertices and 120 edges.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let np = rng.gen_range(1..=4u64);
    let nc = rng.gen_range(1..=3u64);
    let na = rng.gen_range(2..=12u64);
    let nl = rng.gen_range(0..=5u64);
    let nm = rng.gen_range(1..=3u64);
    let mut g = oracle::Graph::default();
    let mut vertices = Vec::new();
    for p in 1..=np {
        let b = rng.gen_bool(0.3);
        vertices.push(
            VertexRecord::new(VertexKind::Person, p)
                .with("name", "p")
                .with("isBlocked", b),
        );
        if b {
            g.blocked.insert(Node::Person(p));
        }
    }
    for c in 1..=nc {
        vertices.push(
            VertexRecord::new(VertexKind::Company, c)
                .with("name", "c")
                .with("isBlocked", false),
        );
    }
    for a in 1..=na {
        let b = rng.gen_bool(0.25);
        let ty = *["normal", "card", "company"].choose(&mut rng).unwrap();
        vertices.push(
            VertexRecord::new(VertexKind::Account, a)
                .with("createTime", Timestamp(1))
                .with("isBlocked", b)
                .with("type", ty),
        );
        if b {
            g.blocked.insert(Node::Account(a));
        }
    }
    for l in 1..=nl {
        let amount = rng.gen_range(1..=500i64) * 100 + rng.gen_range(0..100);
        let balance = rng.gen_range(0..=amount);
        vertices.push(
            VertexRecord::new(VertexKind::Loan, l)
                .with("loanAmount", Money::from_cents(amount))
                .with("balance", Money::from_cents(balance)),
        );
        g.loans.insert(l, (amount, balance));
    }
    for m in 1..=nm {
        let b = rng.gen_bool(0.5);
        let ty = *["POS", "PHONE"].choose(&mut rng).unwrap();
        vertices.push(
            VertexRecord::new(VertexKind::Medium, m)
                .with("type", ty)
                .with("isBlocked", b),
        );
        g.medium_type.insert(m, ty.to_string());
        if b {
            g.blocked.insert(Node::Medium(m));
        }
    }

    let a = VertexRef::account;
    let ts = |rng: &mut ChaCha8Rng| Timestamp(rng.gen_range(1..=40));
    let amt = |rng: &mut ChaCha8Rng| {
        Money::from_cents(rng.gen_range(1..=60) * 100 + rng.gen_range(0..2) * 50)
    };
    let mut edges: Vec<EdgeRecord> = Vec::new();
    for acc in 1..=na {
        if rng.gen_bool(0.85) {
            let owner = if rng.gen_bool(0.7) {
                VertexRef::person(rng.gen_range(1..=np))
            } else {
                VertexRef::company(rng.gen_range(1..=nc))
            };
            edges.push(EdgeRecord::new(EdgeKind::Own, owner, a(acc), ts(&mut rng)));
        }
    }
    for l in 1..=nl {
        let who = if rng.gen_bool(0.7) {
            VertexRef::person(rng.gen_range(1..=np))
        } else {
            VertexRef::company(rng.gen_range(1..=nc))
        };
        edges.push(EdgeRecord::new(
            EdgeKind::Apply,
            who,
            VertexRef::loan(l),
            ts(&mut rng),
        ));
    }
    let mut pairs: BTreeSet<(EdgeKind, VertexRef, VertexRef)> = BTreeSet::new();
    let budget = rng.gen_range(10..=120 - edges.len());
    while edges.len() < budget {
        let roll = rng.gen_range(0..100);
        let t = ts(&mut rng);
        let e = if roll < 55 {
            EdgeRecord::new(
                EdgeKind::Transfer,
                a(rng.gen_range(1..=na)),
                a(rng.gen_range(1..=na)),
                t,
            )
            .with_amount(amt(&mut rng))
        } else if roll < 65 {
            EdgeRecord::new(
                EdgeKind::Withdraw,
                a(rng.gen_range(1..=na)),
                a(rng.gen_range(1..=na)),
                t,
            )
            .with_amount(amt(&mut rng))
        } else if roll < 73 && nl > 0 {
            EdgeRecord::new(
                EdgeKind::Deposit,
                VertexRef::loan(rng.gen_range(1..=nl)),
                a(rng.gen_range(1..=na)),
                t,
            )
            .with_amount(amt(&mut rng))
        } else if roll < 80 && nl > 0 {
            EdgeRecord::new(
                EdgeKind::Repay,
                a(rng.gen_range(1..=na)),
                VertexRef::loan(rng.gen_range(1..=nl)),
                t,
            )
            .with_amount(amt(&mut rng))
        } else if roll < 87 {
            EdgeRecord::new(
                EdgeKind::SignIn,
                VertexRef::medium(rng.gen_range(1..=nm)),
                a(rng.gen_range(1..=na)),
                t,
            )
        } else if roll < 93 {
            let src = if rng.gen_bool(0.8) {
                VertexRef::person(rng.gen_range(1..=np))
            } else {
                VertexRef::company(rng.gen_range(1..=nc))
            };
            EdgeRecord::new(
                EdgeKind::Invest,
                src,
                VertexRef::company(rng.gen_range(1..=nc)),
                t,
            )
            .with("ratio", 0.5)
        } else {
            let (s, d) = if rng.gen_bool(0.85) {
                (
                    VertexRef::person(rng.gen_range(1..=np)),
                    VertexRef::person(rng.gen_range(1..=np)),
                )
            } else {
                (
                    VertexRef::company(rng.gen_range(1..=nc)),
                    VertexRef::company(rng.gen_range(1..=nc)),
                )
            };
            EdgeRecord::new(EdgeKind::Guarantee, s, d, t)
        };
        if e.kind.single_per_pair() && !pairs.insert((e.kind, e.src, e.dst)) {
            continue;
        }
        edges.push(e);
    }
    for e in &edges {
        g.edges.push(oracle::Edge {
            kind: okind(e.kind),
            src: node(e.src),
            dst: node(e.dst),
            ts: e.timestamp.0,
            cents: e.amount().cents(),
        });
    }
    let engine = Engine::volatile(IsolationLevel::Serializable);
    engine.bulk_load(vertices, edges).unwrap();
    Case {
        engine,
        g,
        accounts: (1..=na).collect(),
        persons: (1..=np).collect(),
        loans: (1..=nl).collect(),
    }
}

fn cents(r: Rounded3) -> i64 {
    assert_eq!(r.thousandths() % 10, 0, "money sums carry two decimals");
    r.thousandths() / 10
}

pub fn check(
    c: &Case,
    w: Window,
    th: Rounded3,
    th2: Rounded3,
    mult: Rounded3,
    order: TruncationOrder,
) {
    let tr = TruncationSpec::new(u32::MAX, order).unwrap();
    let ow = (w.start.0, w.end.0);
    let (th_o, th2_o, mult_o) = (th.thousandths(), th2.thousandths(), mult.thousandths());
    let g = &c.g;
    let mut t = c.engine.begin().unwrap();
    for &id in &c.accounts {
        let got: Vec<_> = tcr1(&mut t, id, &w, &tr)
            .unwrap()
            .into_iter()
            .map(|r| (r.other_id, r.account_distance, r.medium_id, r.medium_type))
            .collect();
        assert_eq!(got, g.tcr1(id, ow), "tcr1 {id}");
        for &id2 in &c.accounts {
            assert_eq!(
                tcr3(&mut t, id, id2, &w).unwrap(),
                g.tcr3(id, id2, ow),
                "tcr3 {id} {id2}"
            );
            let got: Vec<_> = tcr4(&mut t, id, id2, &w)
                .unwrap()
                .into_iter()
                .map(|r| {
                    (
                        r.other_id,
                        r.num_edge2,
                        cents(r.sum_edge2_amount),
                        cents(r.max_edge2_amount),
                        r.num_edge3,
                        cents(r.sum_edge3_amount),
                        cents(r.max_edge3_amount),
                    )
                })
                .collect();
            assert_eq!(got, g.tcr4(id, id2, ow), "tcr4 {id} {id2}");
        }
        let got: Vec<_> = tcr6(&mut t, id, th, th2, &w, &tr)
            .unwrap()
            .into_iter()
            .map(|r| {
                (
                    r.mid_id,
                    cents(r.sum_edge1_amount),
                    cents(r.sum_edge2_amount),
                )
            })
            .collect();
        assert_eq!(got, g.tcr6(id, th_o, th2_o, ow), "tcr6 {id}");
        let r = tcr7(&mut t, id, th, &w, &tr).unwrap();
        assert_eq!(
            (r.num_src, r.num_dst, r.in_out_ratio.thousandths()),
            g.tcr7(id, th_o, ow),
            "tcr7 {id}"
        );
        let r = tcr9(&mut t, id, th, &w, &tr).unwrap();
        assert_eq!(
            (
                r.ratio_repay.thousandths(),
                r.ratio_deposit.thousandths(),
                r.ratio_transfer.thousandths()
            ),
            g.tcr9(id, th_o, ow),
            "tcr9 {id}"
        );
        let r = tsr2(&mut t, id, &w).unwrap();
        let mx = |x: Rounded3| (!x.is_sentinel()).then(|| cents(x));
        assert_eq!(
            (
                cents(r.sum_edge1_amount),
                mx(r.max_edge1_amount),
                r.num_edge1,
                cents(r.sum_edge2_amount),
                mx(r.max_edge2_amount),
                r.num_edge2
            ),
            g.tsr2(id, ow),
            "tsr2 {id}"
        );
        assert_eq!(
            tsr3(&mut t, id, th, &w).unwrap().thousandths(),
            g.tsr3(id, th_o, ow)
        );
        let grp = |rows: Vec<finbench_workloads::EdgeGroupRow>| -> Vec<(u64, u64, i64)> {
            rows.into_iter()
                .map(|r| (r.id, r.num_edges, cents(r.sum_amount)))
                .collect()
        };
        assert_eq!(
            grp(tsr4(&mut t, id, th, &w).unwrap()),
            g.tsr45(id, th_o, ow, true)
        );
        assert_eq!(
            grp(tsr5(&mut t, id, th, &w).unwrap()),
            g.tsr45(id, th_o, ow, false)
        );
        assert_eq!(tsr6(&mut t, id, &w).unwrap(), g.tsr6(id, ow), "tsr6 {id}");
    }
    for &p in &c.persons {
        let got: Vec<_> = tcr2(&mut t, p, &w, &tr)
            .unwrap()
            .into_iter()
            .map(|r| {
                (
                    r.other_id,
                    cents(r.sum_loan_amount),
                    cents(r.sum_loan_balance),
                )
            })
            .collect();
        assert_eq!(got, g.tcr2(p, ow), "tcr2 {p}");
        let got: Vec<Vec<u64>> = tcr5(&mut t, p, &w, &tr)
            .unwrap()
            .iter()
            .map(|path| path.vertices().iter().map(|v| v.0).collect())
            .collect();
        assert_eq!(got, g.tcr5(p, ow), "tcr5 {p}");
        for &p2 in &c.persons {
            assert_eq!(
                tcr10(&mut t, p, p2, &w).unwrap().thousandths(),
                g.tcr10(p, p2, ow)
            );
        }
        let r = tcr11(&mut t, p, &w, &tr).unwrap();
        assert_eq!(
            (cents(r.sum_loan_amount), r.num_loans),
            g.tcr11(p, ow),
            "tcr11 {p}"
        );
        let got: Vec<_> = tcr12(&mut t, p, &w, &tr)
            .unwrap()
            .into_iter()
            .map(|r| (r.comp_account_id, cents(r.sum_edge2_amount)))
            .collect();
        assert_eq!(got, g.tcr12(p, ow), "tcr12 {p}");
    }
    for &l in &c.loans {
        let got: Vec<_> = tcr8(&mut t, l, mult, &w, &tr)
            .unwrap()
            .into_iter()
            .map(|r| (r.dst_id, r.ratio.thousandths(), r.min_distance_from_loan))
            .collect();
        assert_eq!(got, g.tcr8(l, mult_o, ow), "tcr8 {l}");
    }
    t.commit().unwrap();
}
