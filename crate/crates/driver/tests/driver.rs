use std::time::Duration;

use finbench_core::{Money, Timestamp};
use finbench_datagen::{ParamSet, UpdateEvent, UpdateStream};
use finbench_driver::*;
use finbench_engine::{EdgeKind, IsolationLevel};
use finbench_workloads::{fixture, QueryKind, ReadParams, ReadQuery, Write};
use proptest::prelude::*;

fn row(seq: u64, delay: u64, warmup: bool) -> LogRow {
    LogRow {
        seq,
        operation: "TCR1".into(),
        param_digest: String::new(),
        scheduled_start_micros: 10,
        actual_start_micros: 10 + delay,
        duration_micros: 5,
        result_code: OK.into(),
        result_digest: String::new(),
        warmup,
    }
}

fn log_of(delays: &[u64]) -> ResultsLog {
    ResultsLog {
        rows: delays
            .iter()
            .enumerate()
            .map(|(i, &d)| row(i as u64, d, false))
            .collect(),
        warmup_micros: 0,
        measurement_micros: 1_000_000,
    }
}

fn durations_log(ms: &[u64]) -> ResultsLog {
    let mut log = log_of(&vec![0; ms.len()]);
    for (r, &d) in log.rows.iter_mut().zip(ms) {
        r.duration_micros = d * 1000;
    }
    log
}

/// Transfers between the fixture accounts, `gap_ms` apart.
fn stream(n: usize, gap_ms: i64) -> UpdateStream {
    UpdateStream {
        events: (0..n)
            .map(|i| UpdateEvent {
                seq: i as u64,
                time: Timestamp(1_000 + i as i64 * gap_ms),
                op: Write::Transfer {
                    account_id1: 1 + (i as u64 % 4),
                    account_id2: 1 + ((i as u64 + 1) % 4),
                    time: Timestamp(1_000 + i as i64 * gap_ms),
                    amount: Money::units(1 + i as i64 % 7),
                },
            })
            .collect(),
    }
}

fn fx_params() -> ParamSet {
    let mut p = ParamSet::default();
    let q = |kind, id| {
        ReadQuery::new(
            kind,
            ReadParams {
                id,
                ..ReadParams::default()
            },
        )
        .canonical()
    };
    p.reads.push((
        QueryKind::Tcr1,
        vec![q(QueryKind::Tcr1, 1), q(QueryKind::Tcr1, 2)],
    ));
    p.reads.push((QueryKind::Tsr6, vec![q(QueryKind::Tsr6, 3)]));
    p
}

fn only(kinds: &[(&str, u32)]) -> ScheduleConfig {
    let mut c = ScheduleConfig::default();
    for f in c.frequencies.values_mut() {
        *f = 0;
    }
    for (k, f) in kinds {
        c.frequencies.insert((*k).into(), *f);
    }
    c
}

fn fast(warmup_ms: u64, window_ms: u64, workers: usize) -> ScheduleConfig {
    ScheduleConfig {
        tcr: 0.001,
        warmup: Duration::from_millis(warmup_ms),
        window: Duration::from_millis(window_ms),
        workers,
        ..only(&[("TCR1", 3), ("TSR6", 5)])
    }
}

#[test]
fn ontime_examples() {
    let mut d = vec![0; 96];
    d.extend([2_000_000; 4]);
    let r = ontime_check(&log_of(&d));
    assert_eq!((r.on_time, r.total), (96, 100));
    assert!((r.fraction - 0.96).abs() < 1e-12 && r.pass);

    let mut d = vec![0; 94];
    d.extend([2_000_000; 6]);
    let r = ontime_check(&log_of(&d));
    assert!((r.fraction - 0.94).abs() < 1e-12 && !r.pass);

    let r = ontime_check(&log_of(&[1_000_000]));
    assert_eq!(r.fraction, 0.0);
    assert!(!r.pass);
    assert!(ontime_check(&log_of(&[999_999])).pass);

    let r = ontime_check(&ResultsLog::default());
    assert_eq!((r.total, r.fraction, r.pass), (0, 1.0, true));

    // warmup rows are not judged
    let mut log = log_of(&[0; 19]);
    log.rows.push(row(19, 5_000_000, true));
    assert_eq!(ontime_check(&log).total, 19);
}

#[test]
fn exactly_95_percent_passes() {
    let mut d = vec![0; 95];
    d.extend([1_000_000; 5]);
    assert!(ontime_check(&log_of(&d)).pass);
}

#[test]
fn summary_examples() {
    let s = summarize(&durations_log(&[1, 2, 3, 4]));
    let k = &s.per_kind["TCR1"];
    assert_eq!((k.min, k.max, k.p50), (1000, 4000, 2000));
    assert_eq!(k.mean, 2500.0);
    assert_eq!((k.p90, k.p95, k.p99), (4000, 4000, 4000));
    assert!((k.stddev - 1118.033988749895).abs() < 1e-6);

    let s = summarize(&durations_log(&[7]));
    let k = &s.per_kind["TCR1"];
    assert_eq!((k.min, k.p50, k.p99, k.max), (7000, 7000, 7000, 7000));
    assert_eq!((k.mean, k.stddev), (7000.0, 0.0));

    let mut log = log_of(&vec![0; 7200]);
    log.measurement_micros = 3_600_000_000;
    assert_eq!(summarize(&log).throughput, 2.0);
    assert_eq!(summarize(&log).total_ops, 7200);
}

#[test]
fn nearest_rank_percentiles() {
    let v: Vec<u64> = (1..=100).collect();
    assert_eq!(nearest_rank(&v, 50.0), 50);
    assert_eq!(nearest_rank(&v, 90.0), 90);
    assert_eq!(nearest_rank(&v, 99.0), 99);
    assert_eq!(nearest_rank(&v, 100.0), 100);
    assert_eq!(nearest_rank(&[5], 1.0), 5);
}

#[test]
fn compression_maps_sim_gaps_to_wall_gaps() {
    let s = stream(3, 1000);
    let cfg = ScheduleConfig {
        tcr: 0.001,
        warmup: Duration::ZERO,
        window: Duration::from_micros(1001),
        ..only(&[])
    };
    let sch = build_schedule(&s, &ParamSet::default(), &cfg).unwrap();
    let at: Vec<u64> = sch.ops.iter().map(|o| o.scheduled_micros).collect();
    assert_eq!(at, vec![0, 1000]);
    assert_eq!(wall_micros(1000, 0.001), 1000);
    assert_eq!(wall_micros(1000, 1.0), 1_000_000);
}

#[test]
fn tcr_lower_bound() {
    let s = stream(10, 1000);
    let mut cfg = fast(0, 1, 1);
    cfg.tcr = 0.0005;
    assert!(cfg.validate().is_err());
    let err = build_schedule(&s, &ParamSet::default(), &cfg).unwrap_err();
    assert!(matches!(err, DriverError::Config(_)), "{err}");
    cfg.tcr = MIN_TCR;
    assert!(build_schedule(&s, &ParamSet::default(), &cfg).is_ok());
}

#[test]
fn short_stream_is_insufficient() {
    let s = stream(10, 1000);
    // 9 s of simulation at 0.001 is 9 ms of wall time
    let err = build_schedule(&s, &ParamSet::default(), &fast(5, 5, 1)).unwrap_err();
    assert!(
        matches!(
            err,
            DriverError::InsufficientUpdates {
                available_micros: 9000,
                needed_micros: 10000
            }
        ),
        "{err}"
    );
    assert!(err.to_string().contains("insufficient updates"));
    let err = build_schedule(
        &UpdateStream::default(),
        &ParamSet::default(),
        &fast(0, 0, 1),
    );
    assert!(matches!(err, Err(DriverError::InsufficientUpdates { .. })));
}

#[test]
fn mix_and_warmup_flags() {
    let s = stream(30, 1000);
    let sch = build_schedule(&s, &fx_params(), &fast(5, 20, 1)).unwrap();
    // updates at 0..=24 ms fit in the 25 ms horizon
    assert_eq!(sch.write_count(), 25);
    let count = |n: &str| sch.ops.iter().filter(|o| o.op.name() == n).count();
    assert_eq!(count("TCR1"), 25 / 3);
    assert_eq!(count("TSR6"), 25 / 5);
    for (i, o) in sch.ops.iter().enumerate() {
        assert_eq!(o.seq, i as u64);
        assert_eq!(o.warmup, o.scheduled_micros < 5000);
    }
    // a read follows the update that triggered it, at the same time
    let first_read = sch.ops.iter().position(|o| o.op.name() == "TCR1").unwrap();
    assert_eq!(first_read, 3);
    assert_eq!(sch.ops[2].scheduled_micros, sch.ops[3].scheduled_micros);
}

#[test]
fn schedule_is_deterministic_and_seeded() {
    let s = stream(200, 1000);
    let a = build_schedule(&s, &fx_params(), &fast(10, 150, 1)).unwrap();
    let b = build_schedule(&s, &fx_params(), &fast(10, 150, 1)).unwrap();
    assert_eq!(a, b);
    let mut other = fast(10, 150, 1);
    other.seed = 99;
    let c = build_schedule(&s, &fx_params(), &other).unwrap();
    assert_eq!(a.len(), c.len());
}

#[test]
fn empty_schedule_gives_empty_log() {
    let engine = fixture::fx(IsolationLevel::Serializable);
    let log = execute(&Schedule::default(), &engine, &fast(0, 0, 2), None).unwrap();
    assert!(log.rows.is_empty());
    assert!(summarize(&log).per_kind.is_empty());
}

#[test]
fn serial_run_starts_in_order_and_never_early() {
    let engine = fixture::fx(IsolationLevel::Serializable);
    let before = engine.edge_count_of(EdgeKind::Transfer);
    let sch = build_schedule(&stream(60, 1000), &fx_params(), &fast(10, 40, 1)).unwrap();
    let log = execute(&sch, &engine, &fast(10, 40, 1), None).unwrap();
    assert_eq!(log.rows.len(), sch.len());
    for w in log.rows.windows(2) {
        assert!(w[0].actual_start_micros <= w[1].actual_start_micros);
        assert!(w[0].seq < w[1].seq);
    }
    for r in &log.rows {
        assert!(r.actual_start_micros >= r.scheduled_start_micros);
        assert_eq!(r.result_code, OK);
    }
    assert_eq!(
        engine.edge_count_of(EdgeKind::Transfer),
        before + sch.write_count()
    );
}

#[test]
fn serial_reruns_agree_per_operation() {
    let sch = build_schedule(&stream(60, 1000), &fx_params(), &fast(0, 50, 1)).unwrap();
    let run = || {
        let engine = fixture::fx(IsolationLevel::Serializable);
        let log = execute(&sch, &engine, &fast(0, 50, 1), None).unwrap();
        let digests: Vec<(u64, String)> = log
            .rows
            .iter()
            .map(|r| (r.seq, r.result_digest.clone()))
            .collect();
        (digests, engine.state_digest())
    };
    assert_eq!(run(), run());
}

#[test]
fn parallel_run_matches_serial_state() {
    let sch = build_schedule(&stream(120, 500), &fx_params(), &fast(0, 55, 1)).unwrap();
    let serial = fixture::fx(IsolationLevel::Serializable);
    execute(&sch, &serial, &fast(0, 55, 1), None).unwrap();
    let par = fixture::fx(IsolationLevel::Serializable);
    let log = execute(&sch, &par, &fast(0, 55, 4), None).unwrap();
    assert_eq!(serial.state_digest(), par.state_digest());
    assert!(log
        .rows
        .iter()
        .all(|r| r.actual_start_micros >= r.scheduled_start_micros));
    assert!(log.rows.iter().all(|r| r.result_code == OK));
}

#[test]
fn persisted_log_reproduces_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.csv");
    let engine = fixture::fx(IsolationLevel::ReadCommitted);
    let sch = build_schedule(&stream(60, 1000), &fx_params(), &fast(10, 40, 2)).unwrap();
    let log = execute(&sch, &engine, &fast(10, 40, 2), Some(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# measurement_micros="));
    assert!(text.starts_with("# warmup_micros=10000"));
    let back = ResultsLog::read(&path).unwrap();
    assert_eq!(back, log);
    assert_eq!(summarize(&back), summarize(&log));
    assert_eq!(ontime_check(&back), ontime_check(&log));
    assert!(log.measurement_micros >= 40_000);
}

#[test]
fn run_benchmark_writes_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let engine = fixture::fx(IsolationLevel::ReadCommitted);
    let out = run_benchmark(
        &engine,
        &stream(60, 1000),
        &fx_params(),
        &fast(5, 30, 2),
        Some(dir.path()),
        true,
    )
    .unwrap();
    assert!(dir.path().join(RESULTS_LOG).exists());
    let props = std::fs::read_to_string(dir.path().join(SUMMARY_PROPERTIES)).unwrap();
    assert!(props.contains(&format!("total_ops={}", out.summary.total_ops)));
    assert!(props.contains("ontime_pass="));
    let text = std::fs::read_to_string(dir.path().join(SUMMARY_TEXT)).unwrap();
    assert!(text.contains("throughput"));

    let quiet = tempfile::tempdir().unwrap();
    run_benchmark(
        &fixture::fx(IsolationLevel::ReadCommitted),
        &stream(60, 1000),
        &fx_params(),
        &fast(5, 30, 2),
        Some(quiet.path()),
        false,
    )
    .unwrap();
    assert!(!quiet.path().join(RESULTS_LOG).exists());
}

#[test]
fn properties_config() {
    let text = "\
# desk run
time_compression_ratio = 0.002
warmup=5s
window: 1m
thread_count=2
tcr1_freq=3
results_dir=out
";
    let props = parse_properties(text).unwrap();
    let mut cfg = ScheduleConfig::default();
    let rest = cfg.apply(&props).unwrap();
    assert_eq!(cfg.tcr, 0.002);
    assert_eq!(cfg.warmup, Duration::from_secs(5));
    assert_eq!(cfg.window, Duration::from_secs(60));
    assert_eq!(cfg.workers, 2);
    assert_eq!(cfg.frequency("TCR1"), 3);
    assert_eq!(rest.get("results_dir").map(String::as_str), Some("out"));

    let d = ScheduleConfig::default();
    assert_eq!(d.warmup, Duration::from_secs(1800));
    assert_eq!(d.window, Duration::from_secs(7200));
    assert_eq!(mixed_kinds().len(), 21);

    let mut cfg = ScheduleConfig::default();
    let low = parse_properties("time_compression_ratio=0.0005").unwrap();
    assert!(cfg.apply(&low).is_err());
    assert!(parse_properties("no separator here").is_err());
    assert!(cfg
        .apply(&parse_properties("bogus_freq=1").unwrap())
        .is_err());
    assert_eq!(parse_duration("250").unwrap(), Duration::from_millis(250));
    assert!(parse_duration("soon").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schedule_is_a_pure_ordered_function(
        gaps in proptest::collection::vec(0i64..5000, 1..80),
        tcr in 0.001f64..0.01,
        f1 in 0u32..6,
        f2 in 0u32..6,
        seed in any::<u64>(),
    ) {
        let mut t = 1_000;
        let events = gaps
            .iter()
            .enumerate()
            .map(|(i, g)| {
                t += g;
                UpdateEvent {
                    seq: i as u64,
                    time: Timestamp(t),
                    op: Write::BlockAccount { account_id: 1 },
                }
            })
            .collect();
        let s = UpdateStream { events };
        let span = wall_micros(t - 1_000 - gaps[0], tcr);
        let mut cfg = only(&[("TCR1", f1), ("TSR6", f2)]);
        cfg.tcr = tcr;
        cfg.seed = seed;
        cfg.warmup = Duration::from_micros(span / 3);
        cfg.window = Duration::from_micros(span - span / 3);
        let a = build_schedule(&s, &fx_params(), &cfg).unwrap();
        prop_assert_eq!(&a, &build_schedule(&s, &fx_params(), &cfg).unwrap());
        for w in a.ops.windows(2) {
            prop_assert!(w[0].scheduled_micros <= w[1].scheduled_micros);
        }
        prop_assert!(a.ops.iter().all(|o| o.scheduled_micros < span.max(1)));
        let writes = a.write_count();
        prop_assert!(writes <= s.len());
        let reads = a.len() - writes;
        let expect = |f: u32| if f == 0 { 0 } else { writes / f as usize };
        prop_assert_eq!(reads, expect(f1) + expect(f2));
    }
}
