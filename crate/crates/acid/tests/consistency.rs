use finbench_acid::{consistency_run, AcidConfig, Workload};
use finbench_engine::{Engine, EngineConfig, IsolationLevel};

fn durable(dir: &std::path::Path, w: &Workload) -> Engine {
    let e = Engine::open(EngineConfig::durable(
        IsolationLevel::Serializable,
        dir.join("c.wal"),
    ))
    .unwrap();
    e.bulk_load(w.vertices.clone(), w.edges.clone()).unwrap();
    e
}

#[test]
fn no_writes_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let w = Workload::synthetic(1, 20, 0);
    let (r, _) = consistency_run(
        durable(dir.path(), &w),
        &w.writes,
        &AcidConfig::stress(0),
        None,
    )
    .unwrap();
    assert!(r.pass, "{}", r.to_text());
    assert_eq!(r.stats["applied"], "0");
}

#[test]
fn thousand_writes_stay_consistent_across_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let w = Workload::synthetic(2, 50, 1000);
    let cfg = AcidConfig::stress(1000);
    let (r, recovered) = consistency_run(durable(dir.path(), &w), &w.writes, &cfg, None).unwrap();
    assert!(r.pass, "{}", r.to_text());
    let applied: usize = r.stats["applied"].parse().unwrap();
    assert!(applied > 900, "applied {applied}");
    assert_eq!(
        recovered.recovery_info().micros.to_string(),
        r.stats["recovery_micros"]
    );
}

#[test]
fn skipped_maintenance_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let w = Workload::synthetic(3, 30, 300);
    let cfg = AcidConfig::stress(300);
    let (r, _) = consistency_run(durable(dir.path(), &w), &w.writes, &cfg, Some(10)).unwrap();
    assert!(!r.pass);
    assert!(r.violations.iter().any(|v| v.starts_with("after pause")));
    assert!(r.violations.iter().any(|v| v.starts_with("after recovery")));
}

#[test]
fn volatile_engine_is_rejected() {
    let w = Workload::synthetic(1, 10, 10);
    let e = Engine::volatile(IsolationLevel::Serializable);
    assert!(consistency_run(e, &w.writes, &AcidConfig::stress(10), None).is_err());
}
