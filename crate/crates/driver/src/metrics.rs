//! On-time rule and run summaries, computed from a results log alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::results::ResultsLog;

/// Required share of measured operations that start on time.
pub const ON_TIME_SHARE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnTime {
    pub on_time: usize,
    pub total: usize,
    pub fraction: f64,
    pub pass: bool,
}

/// Share of measurement-window rows whose start delay is under one second.
/// An empty window passes.
pub fn ontime_check(log: &ResultsLog) -> OnTime {
    let (mut on_time, mut total) = (0, 0);
    for r in log.measured() {
        total += 1;
        on_time += usize::from(r.on_time());
    }
    let fraction = if total == 0 {
        1.0
    } else {
        on_time as f64 / total as f64
    };
    OnTime {
        on_time,
        total,
        fraction,
        pass: fraction >= ON_TIME_SHARE,
    }
}

/// Durations in microseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindStats {
    pub count: usize,
    pub min: u64,
    pub mean: f64,
    pub p50: u64,
    pub p90: u64,
    pub p95: u64,
    pub p99: u64,
    pub max: u64,
    pub stddev: f64,
}

/// Nearest-rank percentile of sorted, nonempty values.
pub fn nearest_rank(sorted: &[u64], pct: f64) -> u64 {
    let n = sorted.len();
    let rank = ((pct / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

impl KindStats {
    pub fn of(mut d: Vec<u64>) -> Option<KindStats> {
        if d.is_empty() {
            return None;
        }
        d.sort_unstable();
        let n = d.len() as f64;
        let mean = d.iter().map(|&x| x as f64).sum::<f64>() / n;
        let var = d.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
        Some(KindStats {
            count: d.len(),
            min: d[0],
            mean,
            p50: nearest_rank(&d, 50.0),
            p90: nearest_rank(&d, 90.0),
            p95: nearest_rank(&d, 95.0),
            p99: nearest_rank(&d, 99.0),
            max: d[d.len() - 1],
            stddev: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub per_kind: BTreeMap<String, KindStats>,
    pub total_ops: usize,
    pub failed_ops: usize,
    pub measurement_micros: u64,
    /// Completed measured operations per second of measurement window.
    pub throughput: f64,
}

pub fn summarize(log: &ResultsLog) -> RunSummary {
    let mut by_kind: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let (mut total, mut failed) = (0, 0);
    for r in log.measured() {
        total += 1;
        failed += usize::from(r.result_code != crate::results::OK);
        by_kind
            .entry(r.operation.clone())
            .or_default()
            .push(r.duration_micros);
    }
    let per_kind = by_kind
        .into_iter()
        .filter_map(|(k, d)| KindStats::of(d).map(|s| (k, s)))
        .collect();
    let secs = log.measurement_micros as f64 / 1e6;
    RunSummary {
        per_kind,
        total_ops: total,
        failed_ops: failed,
        measurement_micros: log.measurement_micros,
        throughput: if secs > 0.0 { total as f64 / secs } else { 0.0 },
    }
}

impl RunSummary {
    /// `key=value` lines.
    pub fn to_properties(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "total_ops={}", self.total_ops);
        let _ = writeln!(s, "failed_ops={}", self.failed_ops);
        let _ = writeln!(s, "measurement_micros={}", self.measurement_micros);
        let _ = writeln!(s, "throughput={:.6}", self.throughput);
        for (k, st) in &self.per_kind {
            let _ = writeln!(s, "{k}.count={}", st.count);
            let _ = writeln!(s, "{k}.min_us={}", st.min);
            let _ = writeln!(s, "{k}.mean_us={:.3}", st.mean);
            let _ = writeln!(s, "{k}.p50_us={}", st.p50);
            let _ = writeln!(s, "{k}.p90_us={}", st.p90);
            let _ = writeln!(s, "{k}.p95_us={}", st.p95);
            let _ = writeln!(s, "{k}.p99_us={}", st.p99);
            let _ = writeln!(s, "{k}.max_us={}", st.max);
            let _ = writeln!(s, "{k}.stddev_us={:.3}", st.stddev);
        }
        s
    }

    /// Fixed-width table for humans.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "operations {}  failed {}  window {:.3} s  throughput {:.3} ops/s",
            self.total_ops,
            self.failed_ops,
            self.measurement_micros as f64 / 1e6,
            self.throughput
        );
        let _ = writeln!(
            s,
            "{:<6} {:>8} {:>10} {:>12} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12}",
            "op", "count", "min", "mean", "p50", "p90", "p95", "p99", "max", "stddev"
        );
        for (k, st) in &self.per_kind {
            let _ = writeln!(
                s,
                "{:<6} {:>8} {:>10} {:>12.1} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12.1}",
                k, st.count, st.min, st.mean, st.p50, st.p90, st.p95, st.p99, st.max, st.stddev
            );
        }
        s.push_str("(durations in microseconds)\n");
        s
    }
}
