//! `finbench` command line: generate, load, create-validation, validate,
//! run, acid and report.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use finbench_acid::{AcidConfig, SuiteEnv, Workload};
use finbench_datagen::{
    generate_to_dir, read_dataset, read_params, read_stream, CurationConfig, GeneratorConfig,
    OutputLayout, ScaleFactorSpec,
};
use finbench_driver::{
    create_validation, ontime_check, parse_duration, read_properties, run_benchmark, summarize,
    validate, DriverError, OnTime, ResultsLog, RunSummary, ScheduleConfig, ValidationSet,
    RESULTS_LOG, SUMMARY_TEXT,
};
use finbench_engine::{Engine, EngineConfig, IsolationLevel};

pub const VALIDATION_FILE: &str = "validation.json";
pub const VALIDATION_TEXT: &str = "validation.txt";
pub const LOAD_PROPERTIES: &str = "load.properties";
pub const DATABASE_FILE: &str = "db.wal";
pub const ACID_PROPERTIES: &str = "acid.properties";
pub const REPORT_FILE: &str = "report.md";
pub const ONTIME_FAILURE: &str = "on-time requirement not met";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Validation, on-time or ACID failure.
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<DriverError> for CliError {
    fn from(e: DriverError) -> Self {
        match e {
            DriverError::Config(m) => CliError::Usage(m),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}
runtime_from!(
    std::io::Error,
    finbench_datagen::DatagenError,
    finbench_engine::EngineError,
    finbench_acid::AcidError
);

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "finbench",
    version,
    about = "Financial transaction graph benchmark kit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset, update stream and curated parameters.
    Generate(GenerateArgs),
    /// Bulk-load a dataset into a durable database under --results_dir.
    Load(LoadArgs),
    /// Record expected read results for the curated parameters.
    CreateValidation(ValidationArgs),
    /// Check the engine's read results against recorded expectations.
    Validate(ValidationArgs),
    /// Run the timed benchmark.
    Run(RunArgs),
    /// Run the ACID test suite.
    Acid(AcidArgs),
    /// Render run summary and ACID results as markdown.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct DataDir {
    /// Dataset directory.
    #[arg(long, default_value = "data")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResultsDir {
    #[arg(long = "results_dir", default_value = "results")]
    pub results_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Scale factor, e.g. 0.01 or SF0.1.
    #[arg(long, default_value = "0.01")]
    pub sf: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub data: DataDir,
}

#[derive(Debug, Args)]
pub struct LoadArgs {
    #[command(flatten)]
    pub data: DataDir,
    #[command(flatten)]
    pub results: ResultsDir,
    #[arg(long, default_value = "serializable")]
    pub isolation: IsolationLevel,
}

#[derive(Debug, Args)]
pub struct ValidationArgs {
    #[command(flatten)]
    pub data: DataDir,
    #[command(flatten)]
    pub results: ResultsDir,
    /// Expectations file; defaults to validation.json under --results_dir.
    #[arg(long)]
    pub expected: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataDir,
    #[command(flatten)]
    pub results: ResultsDir,
    /// Run configuration as key=value lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the per-operation results log.
    #[arg(long = "results_log")]
    pub results_log: bool,
    #[arg(long)]
    pub isolation: Option<IsolationLevel>,
    /// Time-compression ratio, at least 0.001.
    #[arg(long)]
    pub tcr: Option<f64>,
    #[arg(long, value_parser = duration_arg)]
    pub warmup: Option<Duration>,
    #[arg(long, value_parser = duration_arg)]
    pub window: Option<Duration>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AcidArgs {
    #[command(flatten)]
    pub results: ResultsDir,
    #[arg(long, default_value = "serializable")]
    pub isolation: IsolationLevel,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// Run each isolation test once under a fixed interleaving.
    #[arg(long)]
    pub scripted: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub results: ResultsDir,
    /// Defaults to report.md under --results_dir.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn duration_arg(s: &str) -> std::result::Result<Duration, String> {
    parse_duration(s).map_err(|e| e.to_string())
}

/// `-rl` is a two-letter short flag, which clap cannot declare.
fn normalize(args: impl IntoIterator<Item = OsString>) -> Vec<OsString> {
    args.into_iter()
        .map(|a| {
            if a == "-rl" {
                "--results_log".into()
            } else {
                a
            }
        })
        .collect()
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match Cli::try_parse_from(normalize(argv.into_iter().map(Into::into))) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(msg) => {
            print!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command and returns what it prints on success.
pub fn execute(cmd: Command) -> Result<String> {
    match cmd {
        Command::Generate(a) => generate(&a),
        Command::Load(a) => load(&a),
        Command::CreateValidation(a) => create_validation_cmd(&a),
        Command::Validate(a) => validate_cmd(&a),
        Command::Run(a) => run(&a),
        Command::Acid(a) => acid(&a),
        Command::Report(a) => report(&a),
    }
}

fn generate(a: &GenerateArgs) -> Result<String> {
    let sf = ScaleFactorSpec::builtin(&a.sf).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown scale factor {:?}; known: {}",
            a.sf,
            ScaleFactorSpec::names().join(", ")
        ))
    })?;
    let cfg = GeneratorConfig::new(sf, a.seed);
    let curation = CurationConfig {
        seed: a.seed,
        ..CurationConfig::default()
    };
    let g = generate_to_dir(&cfg, &curation, &a.data.out)?;
    Ok(format!(
        "generated {} events ({} initial, {} in the update stream) under {}\n",
        g.full.len(),
        g.split.initial.len(),
        g.split.stream.len(),
        a.data.out.display()
    ))
}

fn load_volatile(data: &Path, isolation: IsolationLevel) -> Result<Engine> {
    let ds = read_dataset(&OutputLayout::new(data).initial())?;
    let engine = Engine::volatile(isolation);
    ds.load(&engine)?;
    Ok(engine)
}

fn load(a: &LoadArgs) -> Result<String> {
    let dir = &a.results.results_dir;
    std::fs::create_dir_all(dir)?;
    let path = dir.join(DATABASE_FILE);
    for p in [path.clone(), finbench_engine::wal::snapshot_path(&path)] {
        if p.exists() {
            std::fs::remove_file(p)?;
        }
    }
    let ds = read_dataset(&OutputLayout::new(&a.data.out).initial())?;
    let started = Instant::now();
    let engine = Engine::open(EngineConfig::durable(a.isolation, &path))?;
    ds.load(&engine)?;
    let wall_micros = started.elapsed().as_micros();
    let (vertices, edges) = ds.records();
    let props = format!(
        "vertices={}\nedges={}\nisolation={}\nload_wall_micros={wall_micros}\n",
        vertices.len(),
        edges.len(),
        a.isolation
    );
    std::fs::write(dir.join(LOAD_PROPERTIES), &props)?;
    Ok(format!(
        "loaded {} vertices and {} edges into {}\n",
        vertices.len(),
        edges.len(),
        path.display()
    ))
}

fn expected_path(a: &ValidationArgs) -> PathBuf {
    a.expected
        .clone()
        .unwrap_or_else(|| a.results.results_dir.join(VALIDATION_FILE))
}

fn create_validation_cmd(a: &ValidationArgs) -> Result<String> {
    let engine = load_volatile(&a.data.out, IsolationLevel::Serializable)?;
    let params = read_params(&OutputLayout::new(&a.data.out).params())?;
    let queries: Vec<_> = params
        .reads
        .iter()
        .flat_map(|(_, qs)| qs.iter().cloned())
        .collect();
    let set = create_validation(&engine, &queries)?;
    let path = expected_path(a);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    set.save(&path)?;
    Ok(format!(
        "recorded {} expectations in {}\n",
        set.len(),
        path.display()
    ))
}

fn validate_cmd(a: &ValidationArgs) -> Result<String> {
    let set = ValidationSet::load(&expected_path(a))?;
    let engine = load_volatile(&a.data.out, IsolationLevel::Serializable)?;
    let report = validate(&engine, &set)?;
    let text = report.to_text();
    let dir = &a.results.results_dir;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(VALIDATION_TEXT), &text)?;
    if report.pass() {
        Ok(text)
    } else {
        Err(CliError::Failed(format!(
            "validation failed: {} of {} checks\n{text}",
            report.failed(),
            report.checks.len()
        )))
    }
}

/// Exit verdict for the on-time rule.
pub fn ontime_verdict(ontime: &OnTime) -> Result<()> {
    if ontime.pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{ONTIME_FAILURE}: {} of {} operations ({:.2}%) started within 1 s of schedule",
            ontime.on_time,
            ontime.total,
            ontime.fraction * 100.0
        )))
    }
}

/// Defaults, then the config file, then flags.
pub fn schedule_config(a: &RunArgs) -> Result<(ScheduleConfig, IsolationLevel)> {
    let mut cfg = ScheduleConfig::default();
    let mut isolation = IsolationLevel::Serializable;
    if let Some(path) = &a.config {
        let rest = cfg.apply(&read_properties(path)?)?;
        for (k, v) in rest {
            match k.as_str() {
                "isolation" | "isolation_level" => {
                    isolation = v
                        .parse()
                        .map_err(|e| CliError::Usage(format!("{k}: {e}")))?
                }
                _ => return Err(CliError::Usage(format!("unknown config key {k:?}"))),
            }
        }
    }
    if let Some(t) = a.tcr {
        cfg.tcr = t;
    }
    if let Some(w) = a.warmup {
        cfg.warmup = w;
    }
    if let Some(w) = a.window {
        cfg.window = w;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(i) = a.isolation {
        isolation = i;
    }
    cfg.validate()?;
    Ok((cfg, isolation))
}

fn run(a: &RunArgs) -> Result<String> {
    let (cfg, isolation) = schedule_config(a)?;
    let layout = OutputLayout::new(&a.data.out);
    let stream = read_stream(&layout.stream())?;
    let params = read_params(&layout.params())?;
    let engine = load_volatile(&a.data.out, isolation)?;
    let out = run_benchmark(
        &engine,
        &stream,
        &params,
        &cfg,
        Some(&a.results.results_dir),
        a.results_log,
    )?;
    ontime_verdict(&out.ontime)?;
    Ok(out.summary.to_text())
}

fn acid(a: &AcidArgs) -> Result<String> {
    let mut cfg = if a.scripted {
        AcidConfig::scripted()
    } else {
        AcidConfig::stress(a.iterations)
    };
    cfg.seed = a.seed;
    cfg.durability_trials = a.trials;
    let dir = &a.results.results_dir;
    let workload = Workload::synthetic(a.seed, 100, a.iterations.max(1));
    let env = SuiteEnv::new(a.isolation, dir.join("acid"), workload);
    let reports = finbench_acid::run_suite(&env, &cfg)?;
    finbench_acid::write_reports(&reports, dir)?;
    let text = finbench_acid::reports_text(&reports);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.test.as_str())
        .collect();
    if failed.is_empty() {
        Ok(text)
    } else {
        Err(CliError::Failed(format!(
            "ACID tests failed: {}\n{text}",
            failed.join(", ")
        )))
    }
}

/// `(test, pass, violations)` rows from an `acid.properties` file.
pub fn parse_acid_properties(text: &str) -> Vec<(String, bool, usize)> {
    let mut rows: Vec<(String, bool, usize)> = Vec::new();
    for line in text.lines() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let Some((test, field)) = key.rsplit_once('.') else {
            continue;
        };
        if test == "acid" {
            continue;
        }
        let i = match rows.iter().position(|r| r.0 == test) {
            Some(i) => i,
            None => {
                rows.push((test.to_owned(), false, 0));
                rows.len() - 1
            }
        };
        match field {
            "pass" => rows[i].1 = value == "true",
            "violations" => rows[i].2 = value.parse().unwrap_or(0),
            _ => {}
        }
    }
    rows
}

/// Markdown for a run summary, its on-time check and ACID results; any
/// part may be absent.
pub fn render_report(
    summary: Option<(&RunSummary, &OnTime)>,
    acid: &[(String, bool, usize)],
    validation: Option<&str>,
) -> String {
    let mut s = String::from("# Benchmark report\n\n");
    if let Some((sum, on)) = summary {
        s.push_str("## Run\n\n");
        let _ = writeln!(s, "| metric | value |\n|---|---|");
        let _ = writeln!(s, "| operations | {} |", sum.total_ops);
        let _ = writeln!(s, "| failed | {} |", sum.failed_ops);
        let _ = writeln!(
            s,
            "| window | {:.3} s |",
            sum.measurement_micros as f64 / 1e6
        );
        let _ = writeln!(s, "| throughput | {:.3} ops/s |", sum.throughput);
        let _ = writeln!(
            s,
            "| on time | {} / {} ({:.2}%) {} |",
            on.on_time,
            on.total,
            on.fraction * 100.0,
            if on.pass { "PASS" } else { "FAIL" }
        );
        s.push_str("\n### Latency (microseconds)\n\n");
        s.push_str("| op | count | mean | p50 | p90 | p95 | p99 | max |\n");
        s.push_str("|---|---|---|---|---|---|---|---|\n");
        for (k, st) in &sum.per_kind {
            let _ = writeln!(
                s,
                "| {k} | {} | {:.1} | {} | {} | {} | {} | {} |",
                st.count, st.mean, st.p50, st.p90, st.p95, st.p99, st.max
            );
        }
        s.push('\n');
    }
    if !acid.is_empty() {
        s.push_str("## ACID\n\n| test | result | violations |\n|---|---|---|\n");
        for (test, pass, v) in acid {
            let _ = writeln!(
                s,
                "| {test} | {} | {v} |",
                if *pass { "PASS" } else { "FAIL" }
            );
        }
        s.push('\n');
    }
    if let Some(v) = validation {
        s.push_str("## Validation\n\n```\n");
        s.push_str(v);
        if !v.ends_with('\n') {
            s.push('\n');
        }
        s.push_str("```\n");
    }
    s
}

fn report(a: &ReportArgs) -> Result<String> {
    let dir = &a.results.results_dir;
    let log_path = dir.join(RESULTS_LOG);
    let run = if log_path.exists() {
        let log = ResultsLog::read(&log_path)?;
        Some((summarize(&log), ontime_check(&log)))
    } else {
        None
    };
    let acid_path = dir.join(ACID_PROPERTIES);
    let acid = if acid_path.exists() {
        parse_acid_properties(&std::fs::read_to_string(acid_path)?)
    } else {
        Vec::new()
    };
    let validation = std::fs::read_to_string(dir.join(VALIDATION_TEXT)).ok();
    if run.is_none() && acid.is_empty() && validation.is_none() {
        let hint = if dir.join(SUMMARY_TEXT).exists() {
            " (rerun with --results_log to keep the per-operation log)"
        } else {
            ""
        };
        return Err(CliError::Runtime(format!(
            "nothing to report in {}{hint}",
            dir.display()
        )));
    }
    let md = render_report(
        run.as_ref().map(|(s, o)| (s, o)),
        &acid,
        validation.as_deref(),
    );
    let out = a.output.clone().unwrap_or_else(|| dir.join(REPORT_FILE));
    std::fs::write(&out, &md)?;
    Ok(format!("wrote {}\n", out.display()))
}
