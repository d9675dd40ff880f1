use std::fmt;
use std::str::FromStr;
use std::time::Duration;

/// Client counts, run length and sleep injection for one test run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcidConfig {
    pub write_clients: usize,
    pub read_clients: usize,
    /// Write transactions per run, shared by the write clients. Read
    /// clients run as many read transactions between them.
    pub iterations: usize,
    /// Injected where the test transactions sleep.
    pub sleep: Duration,
    pub seed: u64,
    /// Run the fixed two-transaction interleaving instead of free
    /// concurrency.
    pub scripted: bool,
    /// How long a scripted step may stay blocked before the schedule moves on.
    pub step_timeout: Duration,
    /// Crash trials of the durability test.
    pub durability_trials: usize,
}

impl Default for AcidConfig {
    fn default() -> Self {
        AcidConfig {
            write_clients: 4,
            read_clients: 2,
            iterations: 1000,
            sleep: Duration::from_millis(100),
            seed: 0,
            scripted: false,
            step_timeout: Duration::from_millis(250),
            durability_trials: 20,
        }
    }
}

impl AcidConfig {
    /// Many short transactions with a token sleep.
    pub fn stress(iterations: usize) -> Self {
        AcidConfig {
            iterations,
            sleep: Duration::from_micros(20),
            ..AcidConfig::default()
        }
    }

    pub fn scripted() -> Self {
        AcidConfig {
            scripted: true,
            iterations: 1,
            ..AcidConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AcidTest {
    AtomicityC,
    AtomicityRb,
    G0,
    G1a,
    G1b,
    G1c,
    Imp,
    Pmp,
    Otv,
    Fr,
    Lu,
    Ws,
    Consistency,
    Durability,
}

impl AcidTest {
    pub const ALL: [AcidTest; 14] = [
        AcidTest::AtomicityC,
        AcidTest::AtomicityRb,
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
        AcidTest::Consistency,
        AcidTest::Durability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AcidTest::AtomicityC => "Atomicity-C",
            AcidTest::AtomicityRb => "Atomicity-RB",
            AcidTest::G0 => "G0",
            AcidTest::G1a => "G1a",
            AcidTest::G1b => "G1b",
            AcidTest::G1c => "G1c",
            AcidTest::Imp => "IMP",
            AcidTest::Pmp => "PMP",
            AcidTest::Otv => "OTV",
            AcidTest::Fr => "FR",
            AcidTest::Lu => "LU",
            AcidTest::Ws => "WS",
            AcidTest::Consistency => "Consistency",
            AcidTest::Durability => "Durability",
        }
    }
}

impl fmt::Display for AcidTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AcidTest {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        AcidTest::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown ACID test {s}"))
    }
}
