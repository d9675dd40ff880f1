//! Substitution parameters for the driver, curated against the initial data.
//!
//! Candidates are drawn at random and kept when the reference engine returns
//! a non-degenerate result for them; after `attempts` misses the last
//! candidate is kept anyway so every kind gets its quota.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use finbench_core::{Money, Rounded3, Timestamp, TruncationOrder, TruncationSpec, Window};
use finbench_engine::{Direction, EdgeKind, Engine, VertexRef};
use finbench_workloads::{
    read, rw_columns, QueryKind, QueryResult, ReadParams, ReadQuery, ReadWrite, Write,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{DatagenError, Result};
use crate::model::Dataset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurationConfig {
    pub seed: u64,
    pub per_kind: usize,
    pub attempts: usize,
    pub truncation_limit: u32,
}

impl Default for CurationConfig {
    fn default() -> Self {
        CurationConfig {
            seed: 0,
            per_kind: 20,
            attempts: 10,
            truncation_limit: 20,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    pub reads: Vec<(QueryKind, Vec<ReadQuery>)>,
    /// TRW1..TRW3 in `rw[number - 1]`.
    pub rw: [Vec<ReadWrite>; 3],
}

impl ParamSet {
    pub fn reads_of(&self, kind: QueryKind) -> &[ReadQuery] {
        self.reads
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }
}

/// Empty or all-sentinel answers.
pub fn is_degenerate(r: &QueryResult) -> bool {
    match r {
        QueryResult::Tcr3(n) => *n < 0,
        QueryResult::Tcr7(x) => x.num_src == 0 && x.num_dst == 0,
        QueryResult::Tcr9(x) => {
            x.ratio_repay.is_sentinel()
                && x.ratio_deposit.is_sentinel()
                && x.ratio_transfer.is_sentinel()
        }
        QueryResult::Tcr10(x) => *x == Rounded3::ZERO,
        QueryResult::Tcr11(x) => x.num_loans == 0,
        QueryResult::Tsr1(_) => false,
        QueryResult::Tsr2(x) => x.num_edge1 == 0 && x.num_edge2 == 0,
        QueryResult::Tsr3(x) => *x == Rounded3::ZERO,
        other => other.row_count() == 0,
    }
}

struct Pool {
    accounts: Vec<u64>,
    cards: Vec<u64>,
    persons: Vec<u64>,
    loans: Vec<u64>,
    start: i64,
    end: i64,
}

impl Pool {
    fn of(ds: &Dataset) -> Pool {
        use Write::*;
        let mut p = Pool {
            accounts: Vec::new(),
            cards: Vec::new(),
            persons: Vec::new(),
            loans: Vec::new(),
            start: ds.first_time().map_or(0, |t| t.0),
            end: ds.last_time().map_or(1, |t| t.0 + 1),
        };
        for e in &ds.events {
            match &e.op {
                AddPerson { person_id, .. } => p.persons.push(*person_id),
                AddPersonAccount {
                    account_id,
                    account_type,
                    ..
                }
                | AddCompanyAccount {
                    account_id,
                    account_type,
                    ..
                } => {
                    p.accounts.push(*account_id);
                    if account_type == "card" {
                        p.cards.push(*account_id);
                    }
                }
                AddPersonLoan { loan_id, .. } | AddCompanyLoan { loan_id, .. } => {
                    p.loans.push(*loan_id)
                }
                _ => {}
            }
        }
        p
    }
}

fn pick(rng: &mut ChaCha8Rng, v: &[u64]) -> u64 {
    v.choose(rng).copied().unwrap_or(1)
}

fn one_of<T: Copy>(rng: &mut ChaCha8Rng, v: &[T]) -> T {
    v[rng.gen_range(0..v.len())]
}

fn window(rng: &mut ChaCha8Rng, start: i64, end: i64) -> Window {
    let len = (end - start).max(2) as f64;
    let s = start - 1 + (len * rng.gen_range(0.0..0.3)) as i64;
    let e = s + ((end - s) as f64 * rng.gen_range(0.5..1.0)) as i64 + 2;
    Window::from_millis(s, e)
}

/// A neighbour reached over `kind` edges, or `None` at a dead end.
fn step(
    engine: &Engine,
    rng: &mut ChaCha8Rng,
    v: VertexRef,
    kind: EdgeKind,
    dir: Direction,
) -> Option<VertexRef> {
    let mut t = engine.begin().ok()?;
    let n = t.neighbors(v, kind, dir, &Window::unbounded(), None).ok()?;
    t.commit().ok()?;
    n.choose(rng).map(|e| e.other(dir))
}

fn candidate(
    engine: &Engine,
    rng: &mut ChaCha8Rng,
    pool: &Pool,
    kind: QueryKind,
    limit: u32,
) -> ReadQuery {
    use QueryKind::*;
    let order = one_of(rng, &TruncationOrder::ALL);
    let mut p = ReadParams {
        window: window(rng, pool.start, pool.end),
        trunc: TruncationSpec::new(limit.max(1), order).expect("positive limit"),
        ..ReadParams::default()
    };
    let small = [0, 100, 500, 1000];
    p.threshold = Rounded3::from_int(one_of(rng, &small));
    p.threshold2 = Rounded3::from_int(one_of(rng, &small));
    match kind {
        Tcr2 | Tcr5 | Tcr11 | Tcr12 => p.id = pick(rng, &pool.persons),
        Tcr6 => p.id = pick(rng, &pool.cards),
        Tcr8 => {
            p.id = pick(rng, &pool.loans);
            p.threshold = Rounded3::from_thousandths(one_of(rng, &[50, 100, 300]));
        }
        Tcr3 | Tcr4 => {
            p.id = pick(rng, &pool.accounts);
            let hops = if kind == Tcr4 {
                1
            } else {
                rng.gen_range(1..=3)
            };
            let mut at = VertexRef::account(p.id);
            for _ in 0..hops {
                match step(engine, rng, at, EdgeKind::Transfer, Direction::Out) {
                    Some(n) => at = n,
                    None => break,
                }
            }
            p.id2 = if at.id.0 == p.id {
                pick(rng, &pool.accounts)
            } else {
                at.id.0
            };
        }
        Tcr10 => {
            p.id = pick(rng, &pool.persons);
            let other = step(
                engine,
                rng,
                VertexRef::person(p.id),
                EdgeKind::Invest,
                Direction::Out,
            )
            .and_then(|c| step(engine, rng, c, EdgeKind::Invest, Direction::In))
            .filter(|v| v.kind == finbench_engine::VertexKind::Person && v.id.0 != p.id);
            p.id2 = other.map_or_else(|| pick(rng, &pool.persons), |v| v.id.0);
        }
        _ => p.id = pick(rng, &pool.accounts),
    }
    ReadQuery::new(kind, p).canonical()
}

fn run(engine: &Engine, q: &ReadQuery) -> Option<QueryResult> {
    let mut t = engine.begin().ok()?;
    let r = read::execute(&mut t, q).ok();
    t.commit().ok()?;
    r
}

/// Read parameters against `engine` (loaded with `initial`) and read-write
/// parameters timed inside `(cutoff, stream_end]`.
pub fn curate(
    engine: &Engine,
    initial: &Dataset,
    cutoff: Timestamp,
    stream_end: Timestamp,
    cfg: &CurationConfig,
) -> Result<ParamSet> {
    let pool = Pool::of(initial);
    let mut out = ParamSet::default();
    if pool.accounts.is_empty() || pool.persons.is_empty() {
        return Ok(out);
    }
    for (i, kind) in QueryKind::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(100 + i as u64);
        let mut rows = Vec::with_capacity(cfg.per_kind);
        for _ in 0..cfg.per_kind {
            let mut q = candidate(engine, &mut rng, &pool, kind, cfg.truncation_limit);
            for _ in 1..cfg.attempts.max(1) {
                if run(engine, &q).is_some_and(|r| !is_degenerate(&r)) {
                    break;
                }
                q = candidate(engine, &mut rng, &pool, kind, cfg.truncation_limit);
            }
            rows.push(q);
        }
        out.reads.push((kind, rows));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(200);
    let lo = cutoff.0 + 1;
    let hi = stream_end.0.max(lo + 1);
    let day = 86_400_000;
    for _ in 0..cfg.per_kind {
        let t = rng.gen_range(lo..=hi);
        let time = Timestamp(t);
        let recent = Window::from_millis(t - 90 * day, t + day);
        let trunc = TruncationSpec::new(
            cfg.truncation_limit.max(1),
            one_of(&mut rng, &TruncationOrder::ALL),
        )
        .expect("positive limit");
        let (a, b) = (
            pick(&mut rng, &pool.accounts),
            pick(&mut rng, &pool.accounts),
        );
        let amount = Money::from_cents(rng.gen_range(100..1_000_000));
        out.rw[0].push(ReadWrite::trw1(a, b, time, amount, recent));
        let (a, b) = (
            pick(&mut rng, &pool.accounts),
            pick(&mut rng, &pool.accounts),
        );
        out.rw[1].push(ReadWrite::trw2(
            a,
            b,
            time,
            amount,
            Rounded3::from_int(one_of(&mut rng, &[0, 100, 500])),
            recent,
            Rounded3::from_thousandths(one_of(&mut rng, &[1500, 2000, 3000])),
            trunc,
        ));
        let (a, b) = (pick(&mut rng, &pool.persons), pick(&mut rng, &pool.persons));
        out.rw[2].push(ReadWrite::trw3(
            a,
            b,
            time,
            Rounded3::from_int(one_of(&mut rng, &[500_000, 2_000_000, 10_000_000])),
            Window::from_millis(pool.start - 1, t + day),
            trunc,
        ));
    }
    Ok(out)
}

fn write_lines(path: &Path, header: &str, lines: impl Iterator<Item = String>) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for l in lines {
        writeln!(f, "{l}")?;
    }
    f.flush()?;
    Ok(())
}

/// One file per kind: `TCR1.csv` .. `TSR6.csv`, `TRW1.csv` .. `TRW3.csv`.
pub fn write_params(p: &ParamSet, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (kind, rows) in &p.reads {
        write_lines(
            &dir.join(format!("{}.csv", kind.name())),
            &kind.header(),
            rows.iter().map(ReadQuery::to_line),
        )?;
    }
    for (i, rows) in p.rw.iter().enumerate() {
        let n = i as u8 + 1;
        write_lines(
            &dir.join(format!("TRW{n}.csv")),
            &rw_columns(n).expect("1..=3").join("|"),
            rows.iter().map(|r| r.fields().join("|")),
        )?;
    }
    Ok(())
}

fn data_lines(path: &Path, header: &str) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let name = path.display().to_string();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => {
            return Err(DatagenError::Row {
                file: name,
                row: 0,
                msg: format!("header {other:?}, expected {header:?}"),
            })
        }
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(str::to_owned)
        .collect())
}

/// Reads whatever parameter files exist in `dir`.
pub fn read_params(dir: &Path) -> Result<ParamSet> {
    let mut out = ParamSet::default();
    for kind in QueryKind::ALL {
        let path = dir.join(format!("{}.csv", kind.name()));
        if !path.exists() {
            continue;
        }
        let mut rows = Vec::new();
        for (i, l) in data_lines(&path, &kind.header())?.iter().enumerate() {
            rows.push(
                ReadQuery::parse_line(kind, l).map_err(|e| DatagenError::Row {
                    file: path.display().to_string(),
                    row: i + 1,
                    msg: e.to_string(),
                })?,
            );
        }
        out.reads.push((kind, rows));
    }
    for n in 1..=3u8 {
        let path = dir.join(format!("TRW{n}.csv"));
        if !path.exists() {
            continue;
        }
        let header = rw_columns(n).expect("1..=3").join("|");
        for (i, l) in data_lines(&path, &header)?.iter().enumerate() {
            let fields: Vec<&str> = l.split('|').collect();
            out.rw[n as usize - 1].push(ReadWrite::from_fields(n, &fields).map_err(|e| {
                DatagenError::Row {
                    file: path.display().to_string(),
                    row: i + 1,
                    msg: e.to_string(),
                }
            })?);
        }
    }
    Ok(out)
}
