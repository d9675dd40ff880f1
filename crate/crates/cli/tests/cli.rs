use std::path::{Path, PathBuf};

use finbench_cli::*;
use finbench_core::{Rounded3, TruncationSpec, Window};
use finbench_driver::{ontime_check, LogRow, ResultsLog, ValidationSet, OK, RESULTS_LOG};
use finbench_engine::{EdgeKind, VertexKind, VertexRef};
use finbench_oracle as oracle;
use finbench_workloads::{QueryKind, ReadParams, ReadQuery};

fn cli(args: &[&str]) -> i32 {
    dispatch(std::iter::once("finbench").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(root: &Path) -> PathBuf {
    let data = root.join("data");
    assert_eq!(
        cli(&[
            "generate",
            "--sf",
            "0.01",
            "--seed",
            "42",
            "--out",
            s(&data)
        ]),
        0
    );
    data
}

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn generate_writes_dataset_and_is_repeatable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let da = generated(a.path());
    let db = generated(b.path());
    assert!(da.join("initial").is_dir());
    assert!(da.join("params").is_dir());
    assert!(da.join("stats.txt").exists());
    let (ta, tb) = (read_tree(&da), read_tree(&db));
    assert!(ta.len() > 5);
    assert_eq!(ta, tb);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["nonsense"]), 2);
    assert_eq!(cli(&["generate", "--bogus"]), 2);
    assert_eq!(cli(&["generate", "--sf", "42"]), 2);
    assert_eq!(cli(&["run", "--tcr", "0.0009"]), 2);
    assert_eq!(cli(&["run", "--warmup", "soon"]), 2);
    assert_eq!(cli(&["acid", "--isolation", "snapshot"]), 2);
    assert_eq!(cli(&[]), 2);
}

#[test]
fn missing_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let nowhere = dir.path().join("none");
    assert_eq!(
        cli(&["load", "--out", s(&nowhere), "--results_dir", s(dir.path())]),
        1
    );
    assert_eq!(cli(&["report", "--results_dir", s(&nowhere)]), 1);
}

#[test]
fn load_creates_database() {
    let dir = tempfile::tempdir().unwrap();
    let data = generated(dir.path());
    let res = dir.path().join("res");
    assert_eq!(
        cli(&["load", "--out", s(&data), "--results_dir", s(&res)]),
        0
    );
    assert!(res.join(DATABASE_FILE).exists());
    let props = std::fs::read_to_string(res.join(LOAD_PROPERTIES)).unwrap();
    assert!(props.contains("vertices="));
    assert!(props.contains("load_wall_micros="));
    // a second load starts from scratch
    assert_eq!(
        cli(&["load", "--out", s(&data), "--results_dir", s(&res)]),
        0
    );
}

fn onode(v: VertexRef) -> oracle::Node {
    let id = v.id.0;
    match v.kind {
        VertexKind::Person => oracle::Node::Person(id),
        VertexKind::Company => oracle::Node::Company(id),
        VertexKind::Account => oracle::Node::Account(id),
        VertexKind::Loan => oracle::Node::Loan(id),
        VertexKind::Medium => oracle::Node::Medium(id),
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

/// Oracle expectations for TSR6 and TCR11 over the whole time span.
fn oracle_expectations(data: &Path) -> ValidationSet {
    let ds = finbench_datagen::read_dataset(&data.join("initial")).unwrap();
    let (vertices, edges) = ds.records();
    let mut g = oracle::Graph::default();
    for v in &vertices {
        if v.get("isBlocked").and_then(|x| x.as_bool()) == Some(true) {
            g.blocked.insert(onode(VertexRef::new(v.kind, v.id.0)));
        }
        if v.kind == VertexKind::Loan {
            let amt = v.get("loanAmount").and_then(|x| x.as_money()).unwrap();
            let bal = v.get("balance").and_then(|x| x.as_money()).unwrap();
            g.loans.insert(v.id.0, (amt.cents(), bal.cents()));
        }
    }
    for e in &edges {
        g.edges.push(oracle::Edge {
            kind: okind(e.kind),
            src: onode(e.src),
            dst: onode(e.dst),
            ts: e.timestamp.0,
            cents: e.amount().cents(),
        });
    }
    let w = (0i64, 4_102_444_800_000i64);
    let query = |kind, id| {
        ReadQuery::new(
            kind,
            ReadParams {
                id,
                id2: 0,
                window: Window::from_millis(w.0, w.1),
                threshold: Rounded3::from_int(0),
                threshold2: Rounded3::from_int(0),
                trunc: TruncationSpec::unlimited(),
            },
        )
        .canonical()
    };
    let accounts: Vec<u64> = vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Account)
        .map(|v| v.id.0)
        .step_by(37)
        .take(20)
        .collect();
    let persons: Vec<u64> = vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Person)
        .map(|v| v.id.0)
        .step_by(29)
        .take(20)
        .collect();
    let mut set = ValidationSet::default();
    for a in accounts {
        let q = query(QueryKind::Tsr6, a);
        set.push(
            q.kind,
            q.to_line(),
            g.tsr6(a, w).iter().map(u64::to_string).collect(),
        );
    }
    for p in persons {
        let q = query(QueryKind::Tcr11, p);
        let (sum, n) = g.tcr11(p, w);
        let sum = Rounded3::from_thousandths(sum * 10);
        set.push(q.kind, q.to_line(), vec![format!("{sum}|{n}")]);
    }
    set
}

#[test]
fn validate_against_oracle_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let data = generated(dir.path());
    let res = dir.path().join("res");
    let v = dir.path().join("v.json");
    let set = oracle_expectations(&data);
    assert_eq!(set.len(), 40);
    set.save(&v).unwrap();
    let args = [
        "validate",
        "--out",
        s(&data),
        "--results_dir",
        s(&res),
        "--expected",
        s(&v),
    ];
    assert_eq!(cli(&args), 0);
    let text = std::fs::read_to_string(res.join(VALIDATION_TEXT)).unwrap();
    assert!(text.contains("40 of 40"), "{text}");

    // a wrong expectation fails with exit 1
    let mut bad = set;
    let e = bad.kinds.get_mut("TCR11").unwrap().first_mut().unwrap();
    e.rows = vec!["1.000|999".into()];
    bad.save(&v).unwrap();
    assert_eq!(cli(&args), 1);
}

#[test]
fn create_validation_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let data = generated(dir.path());
    let res = dir.path().join("res");
    let common = ["--out", s(&data), "--results_dir", s(&res)];
    assert_eq!(cli(&[&["create-validation"][..], &common].concat()), 0);
    let first = std::fs::read(res.join(VALIDATION_FILE)).unwrap();
    assert!(!ValidationSet::load(&res.join(VALIDATION_FILE))
        .unwrap()
        .is_empty());
    assert_eq!(cli(&[&["validate"][..], &common].concat()), 0);
    assert_eq!(cli(&[&["create-validation"][..], &common].concat()), 0);
    assert_eq!(std::fs::read(res.join(VALIDATION_FILE)).unwrap(), first);
}

fn row(seq: u64, delay: u64) -> LogRow {
    LogRow {
        seq,
        operation: "TSR1".into(),
        param_digest: String::new(),
        scheduled_start_micros: 100,
        actual_start_micros: 100 + delay,
        duration_micros: 7,
        result_code: OK.into(),
        result_digest: String::new(),
        warmup: false,
    }
}

#[test]
fn ontime_shortfall_exits_1() {
    let log = |late: u64| ResultsLog {
        rows: (0..100)
            .map(|i| row(i, if i < late { 1_000_000 } else { 999_999 }))
            .collect(),
        warmup_micros: 0,
        measurement_micros: 1_000_000,
    };
    let err = ontime_verdict(&ontime_check(&log(6))).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains(ONTIME_FAILURE));
    assert!(ontime_verdict(&ontime_check(&log(5))).is_ok());
}

#[test]
fn run_writes_log_and_summary_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = generated(dir.path());
    let res = dir.path().join("res");
    let cfg = dir.path().join("run.properties");
    std::fs::write(
        &cfg,
        "time_compression_ratio=0.001\nwarmup=200ms\nwindow=1s\nisolation=read_committed\n",
    )
    .unwrap();
    let args = [
        "run",
        "--out",
        s(&data),
        "--results_dir",
        s(&res),
        "--config",
        s(&cfg),
        "-rl",
    ];
    assert_eq!(cli(&args), 0);
    assert!(res.join(RESULTS_LOG).exists());
    let props = std::fs::read_to_string(res.join("summary.properties")).unwrap();
    assert!(props.contains("ontime_pass=true"), "{props}");

    assert_eq!(cli(&["report", "--results_dir", s(&res)]), 0);
    let md = std::fs::read_to_string(res.join(REPORT_FILE)).unwrap();
    assert!(md.starts_with("# Benchmark report"));
    assert!(md.contains("| throughput |"));

    std::fs::write(&cfg, "mystery_key=1\n").unwrap();
    assert_eq!(cli(&args), 2);
}

#[test]
fn acid_command_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res");
    let ok = [
        "acid",
        "--results_dir",
        s(&res),
        "--iterations",
        "50",
        "--trials",
        "2",
    ];
    assert_eq!(cli(&ok), 0);
    let props = std::fs::read_to_string(res.join(ACID_PROPERTIES)).unwrap();
    assert!(props.contains("acid.pass=true"));
    let rows = parse_acid_properties(&props);
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r.1 && r.2 == 0));

    let bad = [
        "acid",
        "--results_dir",
        s(&res),
        "--scripted",
        "--isolation",
        "read_uncommitted",
        "--trials",
        "1",
    ];
    assert_eq!(cli(&bad), 1);
    assert_eq!(cli(&["report", "--results_dir", s(&res)]), 0);
    let md = std::fs::read_to_string(res.join(REPORT_FILE)).unwrap();
    assert!(md.contains("| G1a | FAIL |"), "{md}");
    assert!(md.contains("| G0 | PASS | 0 |"), "{md}");
}
