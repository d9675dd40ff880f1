use finbench_acid::{run_test, AcidConfig, AcidTest, SuiteEnv, Workload};
use finbench_engine::{Fault, IsolationLevel};

fn env(isolation: IsolationLevel, dir: &std::path::Path) -> SuiteEnv {
    SuiteEnv::new(isolation, dir, Workload::synthetic(7, 40, 200))
}

const ISOLATION_TESTS: [AcidTest; 10] = [
    AcidTest::G0,
    AcidTest::G1a,
    AcidTest::G1b,
    AcidTest::G1c,
    AcidTest::Imp,
    AcidTest::Pmp,
    AcidTest::Otv,
    AcidTest::Fr,
    AcidTest::Lu,
    AcidTest::Ws,
];

#[test]
fn scripted_read_uncommitted_shows_each_read_anomaly() {
    let dir = tempfile::tempdir().unwrap();
    let env = env(IsolationLevel::ReadUncommitted, dir.path());
    let cfg = AcidConfig::scripted();
    for t in [
        AcidTest::G1a,
        AcidTest::G1b,
        AcidTest::Imp,
        AcidTest::Pmp,
        AcidTest::Lu,
        AcidTest::Ws,
    ] {
        let r = run_test(t, &env, &cfg).unwrap();
        assert!(
            !r.pass,
            "{t} should fail under read uncommitted: {}",
            r.to_text()
        );
        assert!(!r.violations.is_empty());
    }
}

#[test]
fn scripted_serializable_passes_every_isolation_test() {
    let dir = tempfile::tempdir().unwrap();
    let env = env(IsolationLevel::Serializable, dir.path());
    let cfg = AcidConfig::scripted();
    for t in ISOLATION_TESTS {
        let r = run_test(t, &env, &cfg).unwrap();
        assert!(r.pass, "{}", r.to_text());
    }
}

#[test]
fn serializable_stress_passes_every_isolation_test() {
    let dir = tempfile::tempdir().unwrap();
    let env = env(IsolationLevel::Serializable, dir.path());
    let cfg = AcidConfig::stress(1000);
    for t in ISOLATION_TESTS {
        let r = run_test(t, &env, &cfg).unwrap();
        assert!(r.pass, "{}", r.to_text());
        let seen: usize = r.stats["observations"].parse().unwrap();
        assert!(seen > 0, "{t} observed nothing");
    }
}

#[test]
fn last_writer_wins_loses_updates() {
    let dir = tempfile::tempdir().unwrap();
    let mut env = env(IsolationLevel::Serializable, dir.path());
    env.fault = Fault::LastWriterWins;
    let r = run_test(AcidTest::Lu, &env, &AcidConfig::scripted()).unwrap();
    assert!(!r.pass, "{}", r.to_text());
}

#[test]
fn report_lines_name_the_test() {
    let dir = tempfile::tempdir().unwrap();
    let env = env(IsolationLevel::Serializable, dir.path());
    let r = run_test(AcidTest::G1a, &env, &AcidConfig::scripted()).unwrap();
    assert!(r.to_text().starts_with("PASS G1a"));
    assert!(r.to_properties().contains("G1a.pass=true"));
}
