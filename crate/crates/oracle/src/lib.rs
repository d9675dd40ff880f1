//! Brute-force reference answers for the read queries.
//!
//! Works on a flat edge list and enumerates every walk explicitly instead of
//! pruning, so it shares no traversal logic with the real implementations.
//! Amounts are integer cents, ratios integer thousandths, windows are open
//! `(start, end)` millisecond intervals. There is no truncation: callers use
//! limits large enough to never cut anything.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Transfer,
    Withdraw,
    Deposit,
    Repay,
    SignIn,
    Invest,
    Apply,
    Guarantee,
    Own,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Person(u64),
    Company(u64),
    Account(u64),
    Loan(u64),
    Medium(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub kind: Kind,
    pub src: Node,
    pub dst: Node,
    pub ts: i64,
    pub cents: i64,
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    pub blocked: BTreeSet<Node>,
    pub medium_type: BTreeMap<u64, String>,
    /// loan id -> (amount cents, balance cents)
    pub loans: BTreeMap<u64, (i64, i64)>,
    pub edges: Vec<Edge>,
}

pub const SENTINEL: i64 = -1000;

/// `num / den` in thousandths, halves rounded away from zero.
pub fn ratio(num: i64, den: i64) -> i64 {
    if den == 0 {
        return SENTINEL;
    }
    let neg = (num < 0) != (den < 0);
    let (n, d) = (
        num.unsigned_abs() as u128 * 2000,
        den.unsigned_abs() as u128,
    );
    // round(x) = floor((2x + 1) / 2) on the doubled numerator
    let q = (n / d).div_ceil(2);
    let q = q as i64;
    if neg {
        -q
    } else {
        q
    }
}

fn inside(w: (i64, i64), ts: i64) -> bool {
    w.0 < ts && ts < w.1
}

fn above(cents: i64, th_thousandths: i64) -> bool {
    cents * 10 > th_thousandths
}

fn acct(n: Node) -> u64 {
    match n {
        Node::Account(a) => a,
        other => panic!("not an account: {other:?}"),
    }
}

impl Graph {
    fn of(&self, kind: Kind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    fn windowed(&self, kind: Kind, w: (i64, i64)) -> Vec<&Edge> {
        self.of(kind).filter(|e| inside(w, e.ts)).collect()
    }

    fn owned(&self, owner: Node) -> BTreeSet<u64> {
        self.of(Kind::Own)
            .filter(|e| e.src == owner)
            .map(|e| acct(e.dst))
            .collect()
    }

    /// Every sequence of 1..=max_len edges of the given kinds, in window,
    /// chained head to tail, starting at one of `from`.
    fn walks(
        &self,
        kinds: &[Kind],
        w: (i64, i64),
        from: &BTreeSet<Node>,
        max_len: usize,
    ) -> Vec<Vec<&Edge>> {
        let pool: Vec<&Edge> = self
            .edges
            .iter()
            .filter(|e| kinds.contains(&e.kind) && inside(w, e.ts))
            .collect();
        let mut out: Vec<Vec<&Edge>> = Vec::new();
        let mut layer: Vec<Vec<&Edge>> = pool
            .iter()
            .filter(|e| from.contains(&e.src))
            .map(|e| vec![*e])
            .collect();
        for _ in 0..max_len {
            out.extend(layer.iter().cloned());
            let mut next = Vec::new();
            for wk in &layer {
                let tail = wk.last().unwrap().dst;
                for e in &pool {
                    if e.src == tail {
                        let mut x = wk.clone();
                        x.push(e);
                        next.push(x);
                    }
                }
            }
            layer = next;
        }
        out
    }

    fn ascending(wk: &[&Edge]) -> bool {
        wk.windows(2).all(|p| p[0].ts < p[1].ts)
    }

    /// (account, distance, medium, mediumType)
    pub fn tcr1(&self, id: u64, w: (i64, i64)) -> Vec<(u64, u32, u64, String)> {
        let start = BTreeSet::from([Node::Account(id)]);
        let mut reached: BTreeSet<(u64, u32)> = BTreeSet::new();
        for wk in self.walks(&[Kind::Transfer], w, &start, 3) {
            if Self::ascending(&wk) {
                let end = acct(wk.last().unwrap().dst);
                if end != id {
                    reached.insert((end, wk.len() as u32));
                }
            }
        }
        let mut rows = BTreeSet::new();
        for (a, d) in reached {
            for e in self.windowed(Kind::SignIn, w) {
                if e.dst == Node::Account(a) && self.blocked.contains(&e.src) {
                    let Node::Medium(m) = e.src else { continue };
                    rows.insert((
                        d,
                        a,
                        m,
                        self.medium_type.get(&m).cloned().unwrap_or_default(),
                    ));
                }
            }
        }
        rows.into_iter().map(|(d, a, m, t)| (a, d, m, t)).collect()
    }

    /// (account, sum amount, sum balance) in cents
    pub fn tcr2(&self, person: u64, w: (i64, i64)) -> Vec<(u64, i64, i64)> {
        let mut upstream = BTreeSet::new();
        for a0 in self.owned(Node::Person(person)) {
            // Reverse every transfer and walk away from a0 with descending
            // timestamps.
            let rev = Graph {
                edges: self
                    .of(Kind::Transfer)
                    .map(|e| Edge {
                        src: e.dst,
                        dst: e.src,
                        ..e.clone()
                    })
                    .collect(),
                ..Graph::default()
            };
            for wk in rev.walks(
                &[Kind::Transfer],
                w,
                &BTreeSet::from([Node::Account(a0)]),
                3,
            ) {
                if wk.windows(2).all(|p| p[0].ts > p[1].ts) {
                    let u = acct(wk.last().unwrap().dst);
                    if u != a0 {
                        upstream.insert(u);
                    }
                }
            }
        }
        let mut rows = Vec::new();
        for u in upstream {
            let loans: BTreeSet<u64> = self
                .windowed(Kind::Deposit, w)
                .into_iter()
                .filter(|e| e.dst == Node::Account(u))
                .filter_map(|e| match e.src {
                    Node::Loan(l) => Some(l),
                    _ => None,
                })
                .collect();
            if loans.is_empty() {
                continue;
            }
            let amt: i64 = loans.iter().map(|l| self.loans[l].0).sum();
            let bal: i64 = loans.iter().map(|l| self.loans[l].1).sum();
            rows.push((u, amt, bal));
        }
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        rows
    }

    pub fn tcr3(&self, id1: u64, id2: u64, w: (i64, i64)) -> i64 {
        if id1 == id2 {
            return 0;
        }
        let mut reach = BTreeSet::from([id1]);
        let n = self.edges.len() as i64 + 1;
        for len in 1..=n {
            let mut next = reach.clone();
            for e in self.windowed(Kind::Transfer, w) {
                if reach.contains(&acct(e.src)) {
                    next.insert(acct(e.dst));
                }
            }
            if next.contains(&id2) {
                return len;
            }
            if next == reach {
                break;
            }
            reach = next;
        }
        -1
    }

    /// (other, n2, sum2, max2, n3, sum3, max3)
    pub fn tcr4(
        &self,
        id1: u64,
        id2: u64,
        w: (i64, i64),
    ) -> Vec<(u64, u64, i64, i64, u64, i64, i64)> {
        let t = self.windowed(Kind::Transfer, w);
        let (src, dst) = (Node::Account(id1), Node::Account(id2));
        if !t.iter().any(|e| e.src == src && e.dst == dst) {
            return Vec::new();
        }
        let mut rows = Vec::new();
        let others: BTreeSet<u64> = t.iter().map(|e| acct(e.dst)).collect();
        for o in others {
            if o == id1 || o == id2 {
                continue;
            }
            let on = Node::Account(o);
            let e2: Vec<i64> = t
                .iter()
                .filter(|e| e.src == dst && e.dst == on)
                .map(|e| e.cents)
                .collect();
            let e3: Vec<i64> = t
                .iter()
                .filter(|e| e.src == on && e.dst == src)
                .map(|e| e.cents)
                .collect();
            if e2.is_empty() || e3.is_empty() {
                continue;
            }
            rows.push((
                o,
                e2.len() as u64,
                e2.iter().sum::<i64>(),
                *e2.iter().max().unwrap(),
                e3.len() as u64,
                e3.iter().sum::<i64>(),
                *e3.iter().max().unwrap(),
            ));
        }
        rows.sort_by(|a, b| b.2.cmp(&a.2).then(b.5.cmp(&a.5)).then(a.0.cmp(&b.0)));
        rows
    }

    /// Paths as vertex id lists, longest first, then lexicographic.
    pub fn tcr5(&self, person: u64, w: (i64, i64)) -> Vec<Vec<u64>> {
        let from: BTreeSet<Node> = self
            .owned(Node::Person(person))
            .into_iter()
            .map(Node::Account)
            .collect();
        let mut set: BTreeSet<Vec<u64>> = BTreeSet::new();
        for wk in self.walks(&[Kind::Transfer], w, &from, 3) {
            if !Self::ascending(&wk) {
                continue;
            }
            let mut vs = vec![acct(wk[0].src)];
            vs.extend(wk.iter().map(|e| acct(e.dst)));
            let distinct: BTreeSet<u64> = vs.iter().copied().collect();
            if distinct.len() == vs.len() {
                set.insert(vs);
            }
        }
        let mut v: Vec<Vec<u64>> = set.into_iter().collect();
        v.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        v
    }

    /// (mid, sum transfer-in, sum withdraw)
    pub fn tcr6(&self, id: u64, th1: i64, th2: i64, w: (i64, i64)) -> Vec<(u64, i64, i64)> {
        let mut rows = Vec::new();
        let mids: BTreeSet<u64> = self
            .windowed(Kind::Withdraw, w)
            .into_iter()
            .filter(|e| e.dst == Node::Account(id) && above(e.cents, th2))
            .map(|e| acct(e.src))
            .collect();
        for m in mids {
            let wd: i64 = self
                .windowed(Kind::Withdraw, w)
                .into_iter()
                .filter(|e| {
                    e.src == Node::Account(m) && e.dst == Node::Account(id) && above(e.cents, th2)
                })
                .map(|e| e.cents)
                .sum();
            let ins: Vec<i64> = self
                .windowed(Kind::Transfer, w)
                .into_iter()
                .filter(|e| e.dst == Node::Account(m) && e.src != e.dst && above(e.cents, th1))
                .map(|e| e.cents)
                .collect();
            if ins.len() > 3 {
                rows.push((m, ins.iter().sum(), wd));
            }
        }
        rows.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
        rows
    }

    /// (numSrc, numDst, ratio thousandths)
    pub fn tcr7(&self, id: u64, th: i64, w: (i64, i64)) -> (u64, u64, i64) {
        let me = Node::Account(id);
        let t = self.windowed(Kind::Transfer, w);
        let ins: Vec<&&Edge> = t
            .iter()
            .filter(|e| e.dst == me && above(e.cents, th))
            .collect();
        let outs: Vec<&&Edge> = t
            .iter()
            .filter(|e| e.src == me && above(e.cents, th))
            .collect();
        let srcs: BTreeSet<Node> = ins.iter().map(|e| e.src).collect();
        let dsts: BTreeSet<Node> = outs.iter().map(|e| e.dst).collect();
        let r = if outs.is_empty() {
            SENTINEL
        } else {
            ratio(
                ins.iter().map(|e| e.cents).sum(),
                outs.iter().map(|e| e.cents).sum(),
            )
        };
        (srcs.len() as u64, dsts.len() as u64, r)
    }

    /// (dst, ratio thousandths, min distance)
    pub fn tcr8(&self, loan: u64, mult: i64, w: (i64, i64)) -> Vec<(u64, i64, u32)> {
        let seeds: BTreeSet<Node> = self
            .of(Kind::Deposit)
            .filter(|e| e.src == Node::Loan(loan))
            .map(|e| e.dst)
            .collect();
        let mut upstream: BTreeMap<Node, i64> = BTreeMap::new();
        for e in self.windowed(Kind::Transfer, w) {
            *upstream.entry(e.dst).or_default() += e.cents;
        }
        let qualifies = |e: &Edge| {
            let base = upstream.get(&e.src).copied().unwrap_or(0);
            i128::from(e.cents) * 1000 > i128::from(mult) * i128::from(base)
        };
        let mut dist: BTreeMap<u64, u32> = BTreeMap::new();
        let mut traced: BTreeSet<usize> = BTreeSet::new();
        // Walks borrow from self.edges, so an address identifies an edge.
        let index = |e: &Edge| e as *const Edge as usize;
        for wk in self.walks(&[Kind::Transfer, Kind::Withdraw], w, &seeds, 3) {
            if !wk.iter().all(|e| qualifies(e)) {
                continue;
            }
            for e in &wk {
                traced.insert(index(e));
            }
            let end = wk.last().unwrap().dst;
            if !seeds.contains(&end) {
                let d = dist.entry(acct(end)).or_insert(u32::MAX);
                *d = (*d).min(wk.len() as u32);
            }
        }
        let amount = self.loans.get(&loan).map(|l| l.0).unwrap_or(0);
        let mut rows: Vec<(u64, i64, u32)> = dist
            .into_iter()
            .map(|(v, d)| {
                let inflow: i64 = self
                    .edges
                    .iter()
                    .filter(|e| traced.contains(&index(e)))
                    .filter(|e| e.dst == Node::Account(v))
                    .map(|e| e.cents)
                    .sum();
                (v, ratio(inflow, amount), d)
            })
            .collect();
        rows.sort_by(|a, b| b.2.cmp(&a.2).then(b.1.cmp(&a.1)).then(a.0.cmp(&b.0)));
        rows
    }

    pub fn tcr9(&self, id: u64, th: i64, w: (i64, i64)) -> (i64, i64, i64) {
        let me = Node::Account(id);
        let pick = |k: Kind, incoming: bool| -> Vec<i64> {
            self.windowed(k, w)
                .into_iter()
                .filter(|e| if incoming { e.dst == me } else { e.src == me })
                .filter(|e| above(e.cents, th))
                .map(|e| e.cents)
                .collect()
        };
        let (e1, e2) = (pick(Kind::Deposit, true), pick(Kind::Repay, false));
        let (e3, e4) = (pick(Kind::Transfer, true), pick(Kind::Transfer, false));
        let r = |n: &[i64], d: &[i64]| {
            if d.is_empty() {
                SENTINEL
            } else {
                ratio(n.iter().sum(), d.iter().sum())
            }
        };
        (r(&e1, &e2), r(&e1, &e4), r(&e3, &e4))
    }

    pub fn tcr10(&self, p1: u64, p2: u64, w: (i64, i64)) -> i64 {
        let set = |p: u64| -> BTreeSet<Node> {
            self.windowed(Kind::Invest, w)
                .into_iter()
                .filter(|e| e.src == Node::Person(p) && matches!(e.dst, Node::Company(_)))
                .map(|e| e.dst)
                .collect()
        };
        let (a, b) = (set(p1), set(p2));
        let union = a.union(&b).count() as i64;
        if union == 0 {
            0
        } else {
            ratio(a.intersection(&b).count() as i64, union)
        }
    }

    /// (sum amount cents, count)
    pub fn tcr11(&self, person: u64, w: (i64, i64)) -> (i64, u64) {
        let g = self.windowed(Kind::Guarantee, w);
        let mut reach: BTreeSet<Node> = BTreeSet::from([Node::Person(person)]);
        loop {
            let before = reach.len();
            for e in &g {
                if reach.contains(&e.src) && matches!(e.dst, Node::Person(_)) {
                    reach.insert(e.dst);
                }
            }
            if reach.len() == before {
                break;
            }
        }
        reach.remove(&Node::Person(person));
        let loans: BTreeSet<u64> = self
            .windowed(Kind::Apply, w)
            .into_iter()
            .filter(|e| reach.contains(&e.src))
            .filter_map(|e| match e.dst {
                Node::Loan(l) => Some(l),
                _ => None,
            })
            .collect();
        (
            loans.iter().map(|l| self.loans[l].0).sum(),
            loans.len() as u64,
        )
    }

    pub fn tcr12(&self, person: u64, w: (i64, i64)) -> Vec<(u64, i64)> {
        let mine = self.owned(Node::Person(person));
        let company_accounts: BTreeSet<u64> = self
            .of(Kind::Own)
            .filter(|e| matches!(e.src, Node::Company(_)))
            .map(|e| acct(e.dst))
            .collect();
        let mut sums: BTreeMap<u64, i64> = BTreeMap::new();
        for e in self.windowed(Kind::Transfer, w) {
            if mine.contains(&acct(e.src)) && company_accounts.contains(&acct(e.dst)) {
                *sums.entry(acct(e.dst)).or_default() += e.cents;
            }
        }
        let mut rows: Vec<(u64, i64)> = sums.into_iter().collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        rows
    }

    /// (sum out, max out, n out, sum in, max in, n in)
    pub fn tsr2(&self, id: u64, w: (i64, i64)) -> (i64, Option<i64>, u64, i64, Option<i64>, u64) {
        let me = Node::Account(id);
        let t = self.windowed(Kind::Transfer, w);
        let outs: Vec<i64> = t.iter().filter(|e| e.src == me).map(|e| e.cents).collect();
        let ins: Vec<i64> = t.iter().filter(|e| e.dst == me).map(|e| e.cents).collect();
        let mx = |v: &[i64]| v.iter().max().copied();
        (
            outs.iter().sum(),
            mx(&outs),
            outs.len() as u64,
            ins.iter().sum(),
            mx(&ins),
            ins.len() as u64,
        )
    }

    pub fn tsr3(&self, id: u64, th: i64, w: (i64, i64)) -> i64 {
        let ins: Vec<&Edge> = self
            .windowed(Kind::Transfer, w)
            .into_iter()
            .filter(|e| e.dst == Node::Account(id) && above(e.cents, th))
            .collect();
        if ins.is_empty() {
            return SENTINEL;
        }
        let blocked = ins.iter().filter(|e| self.blocked.contains(&e.src)).count();
        ratio(blocked as i64, ins.len() as i64)
    }

    /// Outgoing (or incoming) qualifying transfers grouped by the far end.
    pub fn tsr45(&self, id: u64, th: i64, w: (i64, i64), outgoing: bool) -> Vec<(u64, u64, i64)> {
        let me = Node::Account(id);
        let mut g: BTreeMap<u64, (u64, i64)> = BTreeMap::new();
        for e in self.windowed(Kind::Transfer, w) {
            let far = if outgoing && e.src == me {
                e.dst
            } else if !outgoing && e.dst == me {
                e.src
            } else {
                continue;
            };
            if above(e.cents, th) {
                let s = g.entry(acct(far)).or_default();
                s.0 += 1;
                s.1 += e.cents;
            }
        }
        let mut rows: Vec<(u64, u64, i64)> = g.into_iter().map(|(k, (n, s))| (k, n, s)).collect();
        rows.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
        rows
    }

    pub fn tsr6(&self, id: u64, w: (i64, i64)) -> Vec<u64> {
        let t = self.windowed(Kind::Transfer, w);
        let me = Node::Account(id);
        let mut out = BTreeSet::new();
        for a in &t {
            for b in &t {
                if a.dst == me && b.src == a.src && b.dst != me && self.blocked.contains(&b.dst) {
                    out.insert(acct(b.dst));
                }
            }
        }
        out.into_iter().collect()
    }
}
