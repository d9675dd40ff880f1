//! Synthetic financial-activity datasets: simulation, split into initial
//! data and update stream, CSV output, and parameter curation.

mod csv_io;
mod error;
mod model;
mod params;
mod sf;
mod sim;
mod split;

use std::path::{Path, PathBuf};

use finbench_engine::{Engine, IsolationLevel};

pub use csv_io::{
    columns, file_path, read_dataset, read_stream, write_dataset, write_stats, write_stream,
    STREAM_FILE,
};
pub use error::{DatagenError, Result};
pub use model::{files_of, Dataset, Event};
pub use params::{curate, is_degenerate, read_params, write_params, CurationConfig, ParamSet};
pub use sf::{File, ScaleFactorSpec, FILES};
pub use sim::{generate, GeneratorConfig};
pub use split::{split, Split, UpdateEvent, UpdateStream};

/// Layout of a generated output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputLayout {
    pub root: PathBuf,
}

impl OutputLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputLayout { root: root.into() }
    }

    pub fn initial(&self) -> PathBuf {
        self.root.join("initial")
    }

    pub fn stream(&self) -> PathBuf {
        self.root.join(STREAM_FILE)
    }

    pub fn params(&self) -> PathBuf {
        self.root.join("params")
    }

    pub fn stats(&self) -> PathBuf {
        self.root.join("stats.txt")
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub full: Dataset,
    pub split: Split,
    pub params: ParamSet,
}

/// Generates, splits, curates parameters and writes everything under `out`.
pub fn generate_to_dir(
    cfg: &GeneratorConfig,
    curation: &CurationConfig,
    out: &Path,
) -> Result<Generated> {
    let full = generate(cfg)?;
    let sp = split(&full, cfg.split_fraction, cfg.delete_share, cfg.seed)?;
    let layout = OutputLayout::new(out);
    write_dataset(&sp.initial, &layout.initial())?;
    write_stream(&sp.stream, &layout.stream())?;

    let mut stats = sp.initial.stats_text();
    stats.push_str(&format!("scaleFactor={}\n", cfg.sf.name));
    stats.push_str(&format!("seed={}\n", cfg.seed));
    stats.push_str(&format!("streamEvents={}\n", sp.stream.len()));
    stats.push_str(&format!(
        "cutoff={}\n",
        finbench_workloads::format_time(sp.cutoff)
    ));
    write_stats(&stats, &layout.stats())?;

    let engine = Engine::volatile(IsolationLevel::ReadCommitted);
    sp.initial.load(&engine)?;
    let stream_end = sp.stream.events.last().map_or(sp.cutoff, |e| e.time);
    let params = curate(&engine, &sp.initial, sp.cutoff, stream_end, curation)?;
    write_params(&params, &layout.params())?;
    Ok(Generated {
        full,
        split: sp,
        params,
    })
}
