use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Outcome of one test: the violations found and run counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnomalyReport {
    pub test: String,
    /// One evidence line per violation.
    pub violations: Vec<String>,
    pub pass: bool,
    /// Counters such as commits and aborts.
    pub stats: BTreeMap<String, String>,
}

impl AnomalyReport {
    pub fn new(test: impl Into<String>, violations: Vec<String>) -> Self {
        AnomalyReport {
            test: test.into(),
            pass: violations.is_empty(),
            violations,
            stats: BTreeMap::new(),
        }
    }

    pub fn stat(mut self, key: &str, value: impl ToString) -> Self {
        self.stats.insert(key.to_owned(), value.to_string());
        self
    }

    /// `key=value` lines, prefixed with the test name.
    pub fn to_properties(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}.pass={}", self.test, self.pass);
        let _ = writeln!(s, "{}.violations={}", self.test, self.violations.len());
        for (k, v) in &self.stats {
            let _ = writeln!(s, "{}.{k}={v}", self.test);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let _ = write!(s, "{verdict} {}", self.test);
        if !self.stats.is_empty() {
            let kv: Vec<String> = self.stats.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(s, " ({})", kv.join(", "));
        }
        s.push('\n');
        for v in self.violations.iter().take(20) {
            let _ = writeln!(s, "  {v}");
        }
        if self.violations.len() > 20 {
            let _ = writeln!(s, "  ... {} more", self.violations.len() - 20);
        }
        s
    }
}
