//! ACID test suite: atomicity, ten isolation anomaly tests, consistency and
//! durability. Runners drive concurrent clients against an engine; checks
//! are pure functions over what the clients observed.

mod atomicity;
pub mod check;
mod clients;
mod config;
mod consistency;
mod durability;
mod error;
mod isolation;
mod report;
mod scripted;
mod workload;

use std::path::{Path, PathBuf};

use finbench_engine::{Engine, EngineConfig, Fault, IsolationLevel};

pub use atomicity::{atomicity_c_run, atomicity_rb_run, scan_counts, seed_atomicity};
pub use config::{AcidConfig, AcidTest};
pub use consistency::{
    balance_deltas, balance_rows, consistency_run, materialize, recompute_balance,
};
pub use durability::{
    apply_logged, durability_run, write_visible, DurabilityOutcome, DurabilityTrial,
};
pub use error::{AcidError, Result};
pub use isolation::{
    fr_run, g0_run, g1a_run, g1b_run, g1c_run, imp_run, lu_run, otv_run, pmp_run, ws_run,
};
pub use report::AnomalyReport;
pub use scripted::SCHEDULE;
pub use workload::Workload;

/// Where and against what the whole suite runs.
#[derive(Debug, Clone)]
pub struct SuiteEnv {
    pub isolation: IsolationLevel,
    pub fault: Fault,
    /// Log files of the consistency and durability tests go here.
    pub dir: PathBuf,
    pub workload: Workload,
}

impl SuiteEnv {
    pub fn new(isolation: IsolationLevel, dir: impl Into<PathBuf>, workload: Workload) -> Self {
        SuiteEnv {
            isolation,
            fault: Fault::None,
            dir: dir.into(),
            workload,
        }
    }

    fn engine(&self) -> Result<Engine> {
        Ok(Engine::open(
            EngineConfig::volatile(self.isolation).with_fault(self.fault),
        )?)
    }

    fn durable(&self, name: &str) -> Result<Engine> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        for p in [path.clone(), finbench_engine::wal::snapshot_path(&path)] {
            if p.exists() {
                std::fs::remove_file(p)?;
            }
        }
        let engine =
            Engine::open(EngineConfig::durable(self.isolation, &path).with_fault(self.fault))?;
        engine.bulk_load(self.workload.vertices.clone(), self.workload.edges.clone())?;
        Ok(engine)
    }
}

/// Runs one test on a fresh engine.
pub fn run_test(test: AcidTest, env: &SuiteEnv, cfg: &AcidConfig) -> Result<AnomalyReport> {
    match test {
        AcidTest::AtomicityC => atomicity_c_run(&env.engine()?, cfg),
        AcidTest::AtomicityRb => atomicity_rb_run(&env.engine()?, cfg),
        AcidTest::G0 => g0_run(&env.engine()?, cfg),
        AcidTest::G1a => g1a_run(&env.engine()?, cfg),
        AcidTest::G1b => g1b_run(&env.engine()?, cfg),
        AcidTest::G1c => g1c_run(&env.engine()?, cfg),
        AcidTest::Imp => imp_run(&env.engine()?, cfg),
        AcidTest::Pmp => pmp_run(&env.engine()?, cfg),
        AcidTest::Otv => otv_run(&env.engine()?, cfg),
        AcidTest::Fr => fr_run(&env.engine()?, cfg),
        AcidTest::Lu => lu_run(&env.engine()?, cfg),
        AcidTest::Ws => ws_run(&env.engine()?, cfg),
        AcidTest::Consistency => {
            let engine = env.durable("consistency.wal")?;
            let (report, _) = consistency_run(engine, &env.workload.writes, cfg, None)?;
            Ok(report)
        }
        AcidTest::Durability => Ok(durability_run(
            &env.dir.join("durability"),
            env.isolation,
            &env.workload,
            cfg,
        )?
        .report),
    }
}

pub fn run_suite(env: &SuiteEnv, cfg: &AcidConfig) -> Result<Vec<AnomalyReport>> {
    AcidTest::ALL
        .iter()
        .map(|&t| run_test(t, env, cfg))
        .collect()
}

/// `key=value` lines for a set of reports, with an overall verdict.
pub fn reports_properties(reports: &[AnomalyReport]) -> String {
    let mut s: String = reports.iter().map(AnomalyReport::to_properties).collect();
    s.push_str(&format!("acid.pass={}\n", reports.iter().all(|r| r.pass)));
    s
}

pub fn reports_text(reports: &[AnomalyReport]) -> String {
    reports.iter().map(AnomalyReport::to_text).collect()
}

/// Writes `acid.properties` and `acid.txt` under `dir`.
pub fn write_reports(reports: &[AnomalyReport], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("acid.properties"), reports_properties(reports))?;
    std::fs::write(dir.join("acid.txt"), reports_text(reports))?;
    Ok(())
}
