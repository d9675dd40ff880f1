//! Complex (TCR) and simple (TSR) read queries.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use finbench_core::{
    canonicalize_paths, round3, Money, Path, Rounded3, Timestamp, TruncationSpec, Window,
};
use finbench_engine::{
    truncate_edges, Direction, EdgeKind, EdgeRecord, EngineError, Txn, Value, VertexKind, VertexRef,
};

use crate::error::Result;
use crate::query::{exceeds, QueryKind, ReadQuery};
use crate::result::*;

use Direction::{In, Out};

type Edges = Vec<Arc<EdgeRecord>>;

fn require(t: &mut Txn, v: VertexRef) -> Result<()> {
    if t.vertex_exists(v)? {
        Ok(())
    } else {
        Err(EngineError::VertexNotFound {
            kind: v.kind,
            id: v.id.0,
        }
        .into())
    }
}

fn edges(
    t: &mut Txn,
    v: VertexRef,
    kind: EdgeKind,
    dir: Direction,
    w: &Window,
    tr: Option<&TruncationSpec>,
) -> Result<Edges> {
    Ok(t.neighbors(v, kind, dir, w, tr)?)
}

/// Accounts owned by a person or company. Ownership is structural, so no
/// time window applies to it.
fn owned_accounts(t: &mut Txn, owner: VertexRef, tr: &TruncationSpec) -> Result<Vec<u64>> {
    let own = edges(t, owner, EdgeKind::Own, Out, &Window::unbounded(), Some(tr))?;
    let set: BTreeSet<u64> = own.iter().map(|e| e.dst.id.0).collect();
    Ok(set.into_iter().collect())
}

pub(crate) fn is_blocked(t: &mut Txn, v: VertexRef) -> Result<bool> {
    Ok(t.get_property(v, "isBlocked")?
        .and_then(|x| x.as_bool())
        .unwrap_or(false))
}

fn money_prop(t: &mut Txn, v: VertexRef, name: &str) -> Result<Money> {
    Ok(t.get_property(v, name)?
        .and_then(|x| x.as_money())
        .unwrap_or(Money::ZERO))
}

fn ratio(num: Money, den: Money) -> Rounded3 {
    if den == Money::ZERO {
        Rounded3::SENTINEL
    } else {
        round3(i128::from(num.cents()), i128::from(den.cents()))
    }
}

fn r3(m: Money) -> Rounded3 {
    Rounded3::from_money(m)
}

fn sum(es: &[Arc<EdgeRecord>]) -> Money {
    es.iter().map(|e| e.amount()).sum()
}

fn above(es: Edges, th: Rounded3) -> Edges {
    es.into_iter().filter(|e| exceeds(e.amount(), th)).collect()
}

pub fn tcr1(t: &mut Txn, id: u64, w: &Window, tr: &TruncationSpec) -> Result<Vec<Tcr1Row>> {
    require(t, VertexRef::account(id))?;
    // Earliest arrival time per account at the current depth; a later arrival
    // can never extend further than an earlier one.
    let mut frontier: BTreeMap<u64, Timestamp> = BTreeMap::from([(id, Timestamp(i64::MIN))]);
    let mut reached: BTreeSet<(u32, u64)> = BTreeSet::new();
    for depth in 1..=3u32 {
        let mut next: BTreeMap<u64, Timestamp> = BTreeMap::new();
        for (&a, &last) in &frontier {
            for e in edges(
                t,
                VertexRef::account(a),
                EdgeKind::Transfer,
                Out,
                w,
                Some(tr),
            )? {
                if e.timestamp > last {
                    let slot = next.entry(e.dst.id.0).or_insert(e.timestamp);
                    *slot = (*slot).min(e.timestamp);
                }
            }
        }
        reached.extend(next.keys().filter(|&&a| a != id).map(|&a| (depth, a)));
        frontier = next;
    }
    let mut rows = Vec::new();
    let mut media: BTreeMap<u64, Vec<(u64, String)>> = BTreeMap::new();
    for &(depth, a) in &reached {
        if let std::collections::btree_map::Entry::Vacant(e) = media.entry(a) {
            let mut found = BTreeMap::new();
            for e in edges(t, VertexRef::account(a), EdgeKind::SignIn, In, w, Some(tr))? {
                if is_blocked(t, e.src)? {
                    let ty = t
                        .get_property(e.src, "type")?
                        .and_then(|v| v.as_str().map(str::to_owned))
                        .unwrap_or_default();
                    found.insert(e.src.id.0, ty);
                }
            }
            e.insert(found.into_iter().collect());
        }
        for (m, ty) in &media[&a] {
            rows.push(Tcr1Row {
                other_id: a,
                account_distance: depth,
                medium_id: *m,
                medium_type: ty.clone(),
            });
        }
    }
    rows.sort_by_key(|r| (r.account_distance, r.other_id, r.medium_id));
    Ok(rows)
}

pub fn tcr2(t: &mut Txn, id: u64, w: &Window, tr: &TruncationSpec) -> Result<Vec<Tcr2Row>> {
    let person = VertexRef::person(id);
    require(t, person)?;
    let mut upstream: BTreeSet<u64> = BTreeSet::new();
    for start in owned_accounts(t, person, tr)? {
        // Latest departure time per account: walking backwards, each earlier
        // hop must be strictly older than the one after it.
        let mut frontier: BTreeMap<u64, Timestamp> = BTreeMap::from([(start, Timestamp(i64::MAX))]);
        for _ in 1..=3 {
            let mut next: BTreeMap<u64, Timestamp> = BTreeMap::new();
            for (&a, &last) in &frontier {
                for e in edges(
                    t,
                    VertexRef::account(a),
                    EdgeKind::Transfer,
                    In,
                    w,
                    Some(tr),
                )? {
                    if e.timestamp < last {
                        let slot = next.entry(e.src.id.0).or_insert(e.timestamp);
                        *slot = (*slot).max(e.timestamp);
                    }
                }
            }
            upstream.extend(next.keys().filter(|&&a| a != start));
            frontier = next;
        }
    }
    let mut rows = Vec::new();
    for u in upstream {
        let loans: BTreeSet<u64> =
            edges(t, VertexRef::account(u), EdgeKind::Deposit, In, w, Some(tr))?
                .iter()
                .map(|e| e.src.id.0)
                .collect();
        if loans.is_empty() {
            continue;
        }
        let (mut amount, mut balance) = (Money::ZERO, Money::ZERO);
        for l in loans {
            amount += money_prop(t, VertexRef::loan(l), "loanAmount")?;
            balance += money_prop(t, VertexRef::loan(l), "balance")?;
        }
        rows.push(Tcr2Row {
            other_id: u,
            sum_loan_amount: r3(amount),
            sum_loan_balance: r3(balance),
        });
    }
    rows.sort_by(|a, b| {
        b.sum_loan_amount
            .cmp(&a.sum_loan_amount)
            .then(a.other_id.cmp(&b.other_id))
    });
    Ok(rows)
}

pub fn tcr3(t: &mut Txn, id1: u64, id2: u64, w: &Window) -> Result<i64> {
    require(t, VertexRef::account(id1))?;
    require(t, VertexRef::account(id2))?;
    if id1 == id2 {
        return Ok(0);
    }
    let mut dist: BTreeMap<u64, i64> = BTreeMap::from([(id1, 0)]);
    let mut queue = VecDeque::from([id1]);
    while let Some(a) = queue.pop_front() {
        let d = dist[&a];
        for e in edges(t, VertexRef::account(a), EdgeKind::Transfer, Out, w, None)? {
            let b = e.dst.id.0;
            if dist.contains_key(&b) {
                continue;
            }
            if b == id2 {
                return Ok(d + 1);
            }
            dist.insert(b, d + 1);
            queue.push_back(b);
        }
    }
    Ok(-1)
}

#[derive(Default)]
struct Agg {
    n: u64,
    sum: Money,
    max: Money,
}

impl Agg {
    fn add(&mut self, m: Money) {
        self.max = if self.n == 0 { m } else { self.max.max(m) };
        self.n += 1;
        self.sum += m;
    }
}

pub fn tcr4(t: &mut Txn, id1: u64, id2: u64, w: &Window) -> Result<Vec<Tcr4Row>> {
    let (src, dst) = (VertexRef::account(id1), VertexRef::account(id2));
    require(t, src)?;
    require(t, dst)?;
    let direct = edges(t, src, EdgeKind::Transfer, Out, w, None)?;
    if !direct.iter().any(|e| e.dst == dst) {
        return Ok(Vec::new());
    }
    let mut e2: BTreeMap<u64, Agg> = BTreeMap::new();
    for e in edges(t, dst, EdgeKind::Transfer, Out, w, None)? {
        let o = e.dst.id.0;
        if o != id1 && o != id2 {
            e2.entry(o).or_default().add(e.amount());
        }
    }
    let mut e3: BTreeMap<u64, Agg> = BTreeMap::new();
    for e in edges(t, src, EdgeKind::Transfer, In, w, None)? {
        let o = e.src.id.0;
        if o != id1 && o != id2 {
            e3.entry(o).or_default().add(e.amount());
        }
    }
    let mut rows: Vec<Tcr4Row> = e2
        .iter()
        .filter_map(|(o, a2)| {
            e3.get(o).map(|a3| Tcr4Row {
                other_id: *o,
                num_edge2: a2.n,
                sum_edge2_amount: r3(a2.sum),
                max_edge2_amount: r3(a2.max),
                num_edge3: a3.n,
                sum_edge3_amount: r3(a3.sum),
                max_edge3_amount: r3(a3.max),
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        b.sum_edge2_amount
            .cmp(&a.sum_edge2_amount)
            .then(b.sum_edge3_amount.cmp(&a.sum_edge3_amount))
            .then(a.other_id.cmp(&b.other_id))
    });
    Ok(rows)
}

fn tcr5_extend(
    t: &mut Txn,
    path: &mut Vec<u64>,
    last: Timestamp,
    w: &Window,
    tr: &TruncationSpec,
    out: &mut Vec<Path>,
) -> Result<()> {
    if path.len() == 4 {
        return Ok(());
    }
    let at = *path.last().expect("non-empty path");
    // Parallel edges collapse; the earliest usable one keeps most options open.
    let mut next: BTreeMap<u64, Timestamp> = BTreeMap::new();
    for e in edges(
        t,
        VertexRef::account(at),
        EdgeKind::Transfer,
        Out,
        w,
        Some(tr),
    )? {
        let b = e.dst.id.0;
        if e.timestamp > last && !path.contains(&b) {
            let slot = next.entry(b).or_insert(e.timestamp);
            *slot = (*slot).min(e.timestamp);
        }
    }
    for (b, ts) in next {
        path.push(b);
        out.push(Path::from_u64s(path)?);
        tcr5_extend(t, path, ts, w, tr, out)?;
        path.pop();
    }
    Ok(())
}

pub fn tcr5(t: &mut Txn, id: u64, w: &Window, tr: &TruncationSpec) -> Result<Vec<Path>> {
    let person = VertexRef::person(id);
    require(t, person)?;
    let mut out = Vec::new();
    for a in owned_accounts(t, person, tr)? {
        let mut path = vec![a];
        tcr5_extend(t, &mut path, Timestamp(i64::MIN), w, tr, &mut out)?;
    }
    Ok(canonicalize_paths(out))
}

pub fn tcr6(
    t: &mut Txn,
    id: u64,
    th1: Rounded3,
    th2: Rounded3,
    w: &Window,
    tr: &TruncationSpec,
) -> Result<Vec<Tcr6Row>> {
    let card = VertexRef::account(id);
    require(t, card)?;
    let mut withdrawn: BTreeMap<u64, Money> = BTreeMap::new();
    for e in above(edges(t, card, EdgeKind::Withdraw, In, w, Some(tr))?, th2) {
        *withdrawn.entry(e.src.id.0).or_default() += e.amount();
    }
    let mut rows = Vec::new();
    for (mid, out_sum) in withdrawn {
        let ins: Edges = above(
            edges(
                t,
                VertexRef::account(mid),
                EdgeKind::Transfer,
                In,
                w,
                Some(tr),
            )?,
            th1,
        )
        .into_iter()
        .filter(|e| e.src.id.0 != mid)
        .collect();
        if ins.len() > 3 {
            rows.push(Tcr6Row {
                mid_id: mid,
                sum_edge1_amount: r3(sum(&ins)),
                sum_edge2_amount: r3(out_sum),
            });
        }
    }
    rows.sort_by(|a, b| {
        b.sum_edge2_amount
            .cmp(&a.sum_edge2_amount)
            .then(a.mid_id.cmp(&b.mid_id))
    });
    Ok(rows)
}

pub fn tcr7(
    t: &mut Txn,
    id: u64,
    th: Rounded3,
    w: &Window,
    tr: &TruncationSpec,
) -> Result<Tcr7Result> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let ins = above(edges(t, a, EdgeKind::Transfer, In, w, Some(tr))?, th);
    let outs = above(edges(t, a, EdgeKind::Transfer, Out, w, Some(tr))?, th);
    let srcs: BTreeSet<_> = ins.iter().map(|e| e.src).collect();
    let dsts: BTreeSet<_> = outs.iter().map(|e| e.dst).collect();
    let in_out_ratio = if outs.is_empty() {
        Rounded3::SENTINEL
    } else {
        ratio(sum(&ins), sum(&outs))
    };
    Ok(Tcr7Result {
        num_src: srcs.len() as u64,
        num_dst: dsts.len() as u64,
        in_out_ratio,
    })
}

/// `amount > multiplier * base`, exactly.
fn exceeds_scaled(amount: Money, multiplier: Rounded3, base: Money) -> bool {
    i128::from(amount.cents()) * 1000
        > i128::from(multiplier.thousandths()) * i128::from(base.cents())
}

pub fn tcr8(
    t: &mut Txn,
    id: u64,
    th: Rounded3,
    w: &Window,
    tr: &TruncationSpec,
) -> Result<Vec<Tcr8Row>> {
    let loan = VertexRef::loan(id);
    require(t, loan)?;
    let loan_amount = money_prop(t, loan, "loanAmount")?;
    let seeds: BTreeSet<u64> = edges(
        t,
        loan,
        EdgeKind::Deposit,
        Out,
        &Window::unbounded(),
        Some(tr),
    )?
    .iter()
    .map(|e| e.dst.id.0)
    .collect();
    let mut dist: BTreeMap<u64, u32> = seeds.iter().map(|&s| (s, 0)).collect();
    let mut frontier: Vec<u64> = seeds.into_iter().collect();
    let mut traced: BTreeSet<(EdgeKind, u64)> = BTreeSet::new();
    let mut inflow: BTreeMap<u64, Money> = BTreeMap::new();
    for depth in 1..=3u32 {
        let mut next = Vec::new();
        for &u in &frontier {
            let acct = VertexRef::account(u);
            let base = sum(&edges(t, acct, EdgeKind::Transfer, In, w, None)?);
            let mut out = edges(t, acct, EdgeKind::Transfer, Out, w, None)?;
            out.extend(edges(t, acct, EdgeKind::Withdraw, Out, w, None)?);
            truncate_edges(&mut out, tr);
            for e in out {
                if !exceeds_scaled(e.amount(), th, base) {
                    continue;
                }
                let v = e.dst.id.0;
                if traced.insert((e.kind, e.edge_id.0)) {
                    *inflow.entry(v).or_default() += e.amount();
                }
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                    e.insert(depth);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    let mut rows: Vec<Tcr8Row> = dist
        .into_iter()
        .filter(|&(_, d)| d > 0)
        .map(|(v, d)| Tcr8Row {
            dst_id: v,
            ratio: ratio(inflow.get(&v).copied().unwrap_or_default(), loan_amount),
            min_distance_from_loan: d,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.min_distance_from_loan
            .cmp(&a.min_distance_from_loan)
            .then(b.ratio.cmp(&a.ratio))
            .then(a.dst_id.cmp(&b.dst_id))
    });
    Ok(rows)
}

pub fn tcr9(
    t: &mut Txn,
    id: u64,
    th: Rounded3,
    w: &Window,
    tr: &TruncationSpec,
) -> Result<Tcr9Result> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let e1 = above(edges(t, a, EdgeKind::Deposit, In, w, Some(tr))?, th);
    let e2 = above(edges(t, a, EdgeKind::Repay, Out, w, Some(tr))?, th);
    let e3 = above(edges(t, a, EdgeKind::Transfer, In, w, Some(tr))?, th);
    let e4 = above(edges(t, a, EdgeKind::Transfer, Out, w, Some(tr))?, th);
    let over = |n: &Edges, d: &Edges| {
        if d.is_empty() {
            Rounded3::SENTINEL
        } else {
            ratio(sum(n), sum(d))
        }
    };
    Ok(Tcr9Result {
        ratio_repay: over(&e1, &e2),
        ratio_deposit: over(&e1, &e4),
        ratio_transfer: over(&e3, &e4),
    })
}

pub fn tcr10(t: &mut Txn, pid1: u64, pid2: u64, w: &Window) -> Result<Rounded3> {
    let mut sets = Vec::with_capacity(2);
    for p in [pid1, pid2] {
        let v = VertexRef::person(p);
        require(t, v)?;
        let s: BTreeSet<u64> = edges(t, v, EdgeKind::Invest, Out, w, None)?
            .iter()
            .filter(|e| e.dst.kind == VertexKind::Company)
            .map(|e| e.dst.id.0)
            .collect();
        sets.push(s);
    }
    let inter = sets[0].intersection(&sets[1]).count();
    let union = sets[0].union(&sets[1]).count();
    Ok(if union == 0 {
        Rounded3::ZERO
    } else {
        round3(inter as i128, union as i128)
    })
}

pub fn tcr11(t: &mut Txn, id: u64, w: &Window, tr: &TruncationSpec) -> Result<Tcr11Result> {
    let start = VertexRef::person(id);
    require(t, start)?;
    let mut seen: BTreeSet<u64> = BTreeSet::from([id]);
    let mut queue = VecDeque::from([id]);
    let mut loans: BTreeSet<u64> = BTreeSet::new();
    while let Some(p) = queue.pop_front() {
        let v = VertexRef::person(p);
        if p != id {
            for e in edges(t, v, EdgeKind::Apply, Out, w, Some(tr))? {
                loans.insert(e.dst.id.0);
            }
        }
        for e in edges(t, v, EdgeKind::Guarantee, Out, w, Some(tr))? {
            if e.dst.kind == VertexKind::Person && seen.insert(e.dst.id.0) {
                queue.push_back(e.dst.id.0);
            }
        }
    }
    let mut total = Money::ZERO;
    for &l in &loans {
        total += money_prop(t, VertexRef::loan(l), "loanAmount")?;
    }
    Ok(Tcr11Result {
        sum_loan_amount: r3(total),
        num_loans: loans.len() as u64,
    })
}

pub fn tcr12(t: &mut Txn, id: u64, w: &Window, tr: &TruncationSpec) -> Result<Vec<Tcr12Row>> {
    let person = VertexRef::person(id);
    require(t, person)?;
    let mut sums: BTreeMap<u64, Money> = BTreeMap::new();
    let mut company_owned: BTreeMap<u64, bool> = BTreeMap::new();
    for a in owned_accounts(t, person, tr)? {
        for e in edges(
            t,
            VertexRef::account(a),
            EdgeKind::Transfer,
            Out,
            w,
            Some(tr),
        )? {
            let d = e.dst.id.0;
            let is_comp = match company_owned.get(&d) {
                Some(&c) => c,
                None => {
                    let owners = edges(t, e.dst, EdgeKind::Own, In, &Window::unbounded(), None)?;
                    let c = owners.iter().any(|o| o.src.kind == VertexKind::Company);
                    company_owned.insert(d, c);
                    c
                }
            };
            if is_comp {
                *sums.entry(d).or_default() += e.amount();
            }
        }
    }
    let mut rows: Vec<Tcr12Row> = sums
        .into_iter()
        .map(|(d, s)| Tcr12Row {
            comp_account_id: d,
            sum_edge2_amount: r3(s),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.sum_edge2_amount
            .cmp(&a.sum_edge2_amount)
            .then(a.comp_account_id.cmp(&b.comp_account_id))
    });
    Ok(rows)
}

pub fn tsr1(t: &mut Txn, id: u64) -> Result<Tsr1Result> {
    let rec = t
        .get_vertex(VertexKind::Account, id)?
        .ok_or(EngineError::VertexNotFound {
            kind: VertexKind::Account,
            id,
        })?;
    Ok(Tsr1Result {
        create_time: rec
            .get("createTime")
            .and_then(Value::as_datetime)
            .unwrap_or_default(),
        is_blocked: rec.is_blocked(),
        account_type: rec
            .get("type")
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
    })
}

pub fn tsr2(t: &mut Txn, id: u64, w: &Window) -> Result<Tsr2Result> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let agg = |es: &Edges| {
        let mut g = Agg::default();
        for e in es {
            g.add(e.amount());
        }
        let max = if g.n == 0 {
            Rounded3::SENTINEL
        } else {
            r3(g.max)
        };
        (r3(g.sum), max, g.n)
    };
    let (s1, m1, n1) = agg(&edges(t, a, EdgeKind::Transfer, Out, w, None)?);
    let (s2, m2, n2) = agg(&edges(t, a, EdgeKind::Transfer, In, w, None)?);
    Ok(Tsr2Result {
        sum_edge1_amount: s1,
        max_edge1_amount: m1,
        num_edge1: n1,
        sum_edge2_amount: s2,
        max_edge2_amount: m2,
        num_edge2: n2,
    })
}

pub fn tsr3(t: &mut Txn, id: u64, th: Rounded3, w: &Window) -> Result<Rounded3> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let ins = above(edges(t, a, EdgeKind::Transfer, In, w, None)?, th);
    if ins.is_empty() {
        return Ok(Rounded3::SENTINEL);
    }
    let mut blocked = 0i128;
    for e in &ins {
        if is_blocked(t, e.src)? {
            blocked += 1;
        }
    }
    Ok(round3(blocked, ins.len() as i128))
}

fn grouped(es: Edges, dir: Direction) -> Vec<EdgeGroupRow> {
    let mut g: BTreeMap<u64, (u64, Money)> = BTreeMap::new();
    for e in es {
        let slot = g.entry(e.other(dir).id.0).or_default();
        slot.0 += 1;
        slot.1 += e.amount();
    }
    let mut rows: Vec<EdgeGroupRow> = g
        .into_iter()
        .map(|(id, (n, s))| EdgeGroupRow {
            id,
            num_edges: n,
            sum_amount: r3(s),
        })
        .collect();
    rows.sort_by(|a, b| b.sum_amount.cmp(&a.sum_amount).then(a.id.cmp(&b.id)));
    rows
}

pub fn tsr4(t: &mut Txn, id: u64, th: Rounded3, w: &Window) -> Result<Vec<EdgeGroupRow>> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let es = above(edges(t, a, EdgeKind::Transfer, Out, w, None)?, th);
    Ok(grouped(es, Out))
}

pub fn tsr5(t: &mut Txn, id: u64, th: Rounded3, w: &Window) -> Result<Vec<EdgeGroupRow>> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let es = above(edges(t, a, EdgeKind::Transfer, In, w, None)?, th);
    Ok(grouped(es, In))
}

pub fn tsr6(t: &mut Txn, id: u64, w: &Window) -> Result<Vec<u64>> {
    let a = VertexRef::account(id);
    require(t, a)?;
    let mids: BTreeSet<VertexRef> = edges(t, a, EdgeKind::Transfer, In, w, None)?
        .iter()
        .map(|e| e.src)
        .collect();
    let mut out = BTreeSet::new();
    for m in mids {
        for e in edges(t, m, EdgeKind::Transfer, Out, w, None)? {
            let d = e.dst.id.0;
            if d != id && !out.contains(&d) && is_blocked(t, e.dst)? {
                out.insert(d);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Runs one read query inside `t`.
pub fn execute(t: &mut Txn, q: &ReadQuery) -> Result<QueryResult> {
    let p = &q.params;
    let (w, tr) = (&p.window, &p.trunc);
    Ok(match q.kind {
        QueryKind::Tcr1 => QueryResult::Tcr1(tcr1(t, p.id, w, tr)?),
        QueryKind::Tcr2 => QueryResult::Tcr2(tcr2(t, p.id, w, tr)?),
        QueryKind::Tcr3 => QueryResult::Tcr3(tcr3(t, p.id, p.id2, w)?),
        QueryKind::Tcr4 => QueryResult::Tcr4(tcr4(t, p.id, p.id2, w)?),
        QueryKind::Tcr5 => QueryResult::Tcr5(tcr5(t, p.id, w, tr)?),
        QueryKind::Tcr6 => QueryResult::Tcr6(tcr6(t, p.id, p.threshold, p.threshold2, w, tr)?),
        QueryKind::Tcr7 => QueryResult::Tcr7(tcr7(t, p.id, p.threshold, w, tr)?),
        QueryKind::Tcr8 => QueryResult::Tcr8(tcr8(t, p.id, p.threshold, w, tr)?),
        QueryKind::Tcr9 => QueryResult::Tcr9(tcr9(t, p.id, p.threshold, w, tr)?),
        QueryKind::Tcr10 => QueryResult::Tcr10(tcr10(t, p.id, p.id2, w)?),
        QueryKind::Tcr11 => QueryResult::Tcr11(tcr11(t, p.id, w, tr)?),
        QueryKind::Tcr12 => QueryResult::Tcr12(tcr12(t, p.id, w, tr)?),
        QueryKind::Tsr1 => QueryResult::Tsr1(tsr1(t, p.id)?),
        QueryKind::Tsr2 => QueryResult::Tsr2(tsr2(t, p.id, w)?),
        QueryKind::Tsr3 => QueryResult::Tsr3(tsr3(t, p.id, p.threshold, w)?),
        QueryKind::Tsr4 => QueryResult::Tsr4(tsr4(t, p.id, p.threshold, w)?),
        QueryKind::Tsr5 => QueryResult::Tsr5(tsr5(t, p.id, p.threshold, w)?),
        QueryKind::Tsr6 => QueryResult::Tsr6(tsr6(t, p.id, w)?),
    })
}
