//! Config parsing and file outputs.
//!
//! Config files and manifests are flat UTF-8 `key=value` text with `#`
//! comments. Metrics, snapshots and traces are CSV with reals written to
//! 17 significant digits so they parse back to the same doubles.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{default_snapshot_times, SimConfig, CONFIG_KEYS};
use crate::error::{FlockError, Result};
use crate::integrator::Sink;
use crate::metrics::MetricsRow;
use crate::state::SimState;

pub const METRICS_HEADER: &str = "t,gamma,min_sep,mean_nbrs,min_nbrs,max_nbrs";
pub const METRICS_FILE: &str = "metrics.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const TRACE_FILE: &str = "trace.csv";

/// `(kind, file name relative to out_dir)` pairs.
pub type Artifacts = Vec<(String, String)>;

const CODE_VERSION_KEY: &str = "code_version";
const ARTIFACT_PREFIX: &str = "artifact.";

/// Formats like C's `%.17g`.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

pub fn metrics_line(row: &MetricsRow) -> String {
    format!(
        "{},{},{},{},{},{}",
        format_real(row.t),
        format_opt(row.gamma),
        format_opt(row.min_separation),
        format_real(row.mean_nbrs),
        row.min_nbrs,
        row.max_nbrs
    )
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| FlockError::io(path, e))
}

/// Writes a complete metrics CSV.
pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| FlockError::io(path, e);
    writeln!(w, "{METRICS_HEADER}").map_err(io)?;
    for row in rows {
        writeln!(w, "{}", metrics_line(row)).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t}.csv")
}

fn state_header(m: usize, prefix: &str) -> String {
    let mut cols: Vec<String> = vec![prefix.to_string()];
    cols.extend((0..m).map(|d| format!("p{d}")));
    cols.extend((0..m).map(|d| format!("v{d}")));
    cols.join(",")
}

fn agent_fields(state: &SimState, i: usize) -> String {
    let a = &state.agents()[i];
    a.position
        .components()
        .iter()
        .chain(a.velocity.components())
        .map(|&c| format_real(c))
        .collect::<Vec<_>>()
        .join(",")
}

fn dim_of(state: &SimState) -> usize {
    state.agents().first().map_or(0, |a| a.position.dim())
}

/// Writes `snapshot_t<t>.csv` into `dir`: `id,p0..,v0..`, one row per agent.
pub fn write_snapshot(dir: &Path, t: f64, state: &SimState) -> Result<PathBuf> {
    let path = dir.join(snapshot_file_name(t));
    let mut w = create(&path)?;
    let io = |e| FlockError::io(&path, e);
    writeln!(w, "{}", state_header(dim_of(state), "id")).map_err(io)?;
    for a in state.agents() {
        writeln!(w, "{},{}", a.id, agent_fields(state, a.id)).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(path)
}

/// Applies `key=value` lines from a config (or manifest) file, then the
/// overrides, then validates. Keys never set fall back to the defaults;
/// unset snapshot times default to quarters of `t_end`.
pub fn parse_config(contents: &str, overrides: &[(String, String)]) -> Result<SimConfig> {
    let mut config = SimConfig::default();
    let mut snapshots_set = false;

    let mut apply = |key: &str, value: &str| -> Result<()> {
        if key == CODE_VERSION_KEY || key.starts_with(ARTIFACT_PREFIX) {
            return Ok(());
        }
        config.set(key, value)?;
        snapshots_set |= key == "snapshot_times";
        Ok(())
    };

    for (lineno, raw) in contents.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            FlockError::config(line, format!("line {}: expected key=value", lineno + 1))
        })?;
        apply(key.trim(), value.trim())?;
    }
    for (key, value) in overrides {
        apply(key, value)?;
    }

    if !snapshots_set {
        config.snapshot_times = default_snapshot_times(config.t_end);
    }
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<SimConfig> {
    let contents = fs::read_to_string(path).map_err(|e| FlockError::io(path, e))?;
    parse_config(&contents, overrides)
}

/// Everything needed to reproduce a run: the resolved config plus the
/// files it produced. Wall-clock time is reported on stdout only, so that
/// repeated runs write identical manifests.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SimConfig,
    pub code_version: String,
    pub artifacts: Artifacts,
}

impl RunManifest {
    pub fn new(config: SimConfig, artifacts: Artifacts) -> Self {
        Self {
            config,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            artifacts,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# flock run manifest\n");
        out.push_str(&format!("{CODE_VERSION_KEY}={}\n", self.code_version));
        for key in CONFIG_KEYS {
            let value = self.config.get(key).expect("known key");
            out.push_str(&format!("{key}={value}\n"));
        }
        for (kind, file) in &self.artifacts {
            out.push_str(&format!("{ARTIFACT_PREFIX}{kind}={file}\n"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| FlockError::io(path, e))
    }
}

/// Streams metrics (and optionally trajectories) to CSV under `out_dir`,
/// writes snapshot files, and keeps the metrics rows for summaries.
pub struct CsvSink {
    dir: PathBuf,
    metrics: BufWriter<File>,
    trace: Option<BufWriter<File>>,
    artifacts: Artifacts,
    rows: Vec<MetricsRow>,
}

impl CsvSink {
    pub fn create(dir: &Path, tracing: bool) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| FlockError::io(dir, e))?;
        let metrics_path = dir.join(METRICS_FILE);
        let mut metrics = create(&metrics_path)?;
        writeln!(metrics, "{METRICS_HEADER}").map_err(|e| FlockError::io(&metrics_path, e))?;
        let mut artifacts = vec![("metrics".to_string(), METRICS_FILE.to_string())];
        let trace = if tracing {
            artifacts.push(("trace".to_string(), TRACE_FILE.to_string()));
            Some(create(&dir.join(TRACE_FILE))?)
        } else {
            None
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            metrics,
            trace,
            artifacts,
            rows: Vec::new(),
        })
    }

    pub fn rows(&self) -> &[MetricsRow] {
        &self.rows
    }

    /// Flushes all streams and returns `(rows, artifacts)`.
    pub fn finish(mut self) -> Result<(Vec<MetricsRow>, Artifacts)> {
        self.metrics
            .flush()
            .map_err(|e| FlockError::io(self.dir.join(METRICS_FILE), e))?;
        if let Some(t) = self.trace.as_mut() {
            t.flush()
                .map_err(|e| FlockError::io(self.dir.join(TRACE_FILE), e))?;
        }
        Ok((self.rows, self.artifacts))
    }
}

impl Sink for CsvSink {
    fn metrics(&mut self, row: &MetricsRow) -> Result<()> {
        writeln!(self.metrics, "{}", metrics_line(row))
            .map_err(|e| FlockError::io(self.dir.join(METRICS_FILE), e))?;
        self.rows.push(row.clone());
        Ok(())
    }

    fn snapshot(&mut self, t: f64, state: &SimState) -> Result<()> {
        write_snapshot(&self.dir, t, state)?;
        self.artifacts
            .push(("snapshot".to_string(), snapshot_file_name(t)));
        Ok(())
    }

    fn trace(&mut self, state: &SimState) -> Result<()> {
        let Some(w) = self.trace.as_mut() else {
            return Ok(());
        };
        let path = self.dir.join(TRACE_FILE);
        let io = |e| FlockError::io(&path, e);
        if state.step_index() == 0 {
            writeln!(w, "step,t,{}", state_header(dim_of(state), "id")).map_err(io)?;
        }
        let t = format_real(state.time());
        for a in state.agents() {
            writeln!(
                w,
                "{},{t},{},{}",
                state.step_index(),
                a.id,
                agent_fields(state, a.id)
            )
            .map_err(io)?;
        }
        Ok(())
    }
}
