//! Run orchestration shared by the CLI subcommands: single runs to disk,
//! per-run summaries, seed lists and sweep aggregates.

use std::path::Path;
use std::time::Duration;

use crate::config::{ModelKind, SimConfig};
use crate::error::{FlockError, Result};
use crate::integrator::{run, MetricsOnly, RunSummary};
use crate::io::{format_real, CsvSink, RunManifest, MANIFEST_FILE};
use crate::metrics::{window_mean, window_std, MetricsRow};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub model: ModelKind,
    pub seed: u64,
    pub final_gamma: Option<f64>,
    pub final_min_sep: Option<f64>,
    /// Means over the second half of the run, `[t_end/2, t_end]`.
    pub late_gamma: Option<f64>,
    pub late_min_sep: Option<f64>,
    /// Fluctuation of the minimum separation in the late window; small for
    /// rigid formations.
    pub late_min_sep_std: Option<f64>,
    pub late_mean_nbrs: Option<f64>,
    pub max_speed: f64,
    pub wall_time: Duration,
}

pub fn late_window(config: &SimConfig) -> (f64, f64) {
    (config.t_end / 2.0, config.t_end)
}

pub fn summarize(config: &SimConfig, rows: &[MetricsRow], run: &RunSummary) -> ExperimentSummary {
    let (t0, t1) = late_window(config);
    ExperimentSummary {
        model: config.model,
        seed: config.seed,
        final_gamma: run.final_gamma,
        final_min_sep: run.final_min_separation,
        late_gamma: window_mean(rows, t0, t1, |r| r.gamma),
        late_min_sep: window_mean(rows, t0, t1, |r| r.min_separation),
        late_min_sep_std: window_std(rows, t0, t1, |r| r.min_separation),
        late_mean_nbrs: window_mean(rows, t0, t1, |r| Some(r.mean_nbrs)),
        max_speed: run.max_speed,
        wall_time: run.wall_time,
    }
}

/// Runs `config` writing metrics, snapshots, optional trace and the
/// manifest into `config.out_dir`.
pub fn run_to_dir(config: &SimConfig) -> Result<(ExperimentSummary, RunManifest)> {
    let mut sink = CsvSink::create(&config.out_dir, config.trace_stride > 0)?;
    let outcome = run(config, &mut sink)?;
    let (rows, artifacts) = sink.finish()?;
    let manifest = RunManifest::new(config.clone(), artifacts);
    manifest.write(&config.out_dir.join(MANIFEST_FILE))?;
    Ok((summarize(config, &rows, &outcome), manifest))
}

/// Runs `config` keeping only the metrics rows in memory.
pub fn run_in_memory(config: &SimConfig) -> Result<(ExperimentSummary, Vec<MetricsRow>)> {
    let mut sink = MetricsOnly::default();
    let outcome = run(config, &mut sink)?;
    Ok((summarize(config, &sink.rows, &outcome), sink.rows))
}

/// Parses `a..b` (inclusive), `a..=b`, or a comma-separated list.
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let bad = || FlockError::config("seeds", format!("cannot parse seed list `{text}`"));
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    let seeds = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<Vec<u64>>>()?;
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// Mean, population standard deviation, minimum and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Aggregate {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        Some(Self {
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            count,
        })
    }
}

pub const SUMMARY_HEADER: &str =
    "model,seed,final_gamma,final_min_sep,late_gamma,late_min_sep,late_min_sep_std,late_mean_nbrs,max_speed";

pub fn summary_line(s: &ExperimentSummary) -> String {
    let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        s.model,
        s.seed,
        opt(s.final_gamma),
        opt(s.final_min_sep),
        opt(s.late_gamma),
        opt(s.late_min_sep),
        opt(s.late_min_sep_std),
        opt(s.late_mean_nbrs),
        format_real(s.max_speed)
    )
}

pub fn write_summaries(path: &Path, summaries: &[ExperimentSummary], extra: &str) -> Result<()> {
    let mut text = format!("{SUMMARY_HEADER}\n");
    for s in summaries {
        text.push_str(&summary_line(s));
        text.push('\n');
    }
    text.push_str(extra);
    std::fs::write(path, text).map_err(|e| FlockError::io(path, e))
}
