use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{FlockError, Result};

/// Interaction model driving the velocity update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    /// Cohesion-separation plus relative-velocity consensus.
    PosVel,
    /// Position-only alignment with the threshold weight `k|N_i|`.
    Position,
    /// Position-only alignment with the decaying weight `|N_i|/t`.
    PositionNoThreshold,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::PosVel,
        ModelKind::Position,
        ModelKind::PositionNoThreshold,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::PosVel => "pos_vel",
            ModelKind::Position => "position",
            ModelKind::PositionNoThreshold => "position_no_threshold",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = FlockError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "pos_vel" | "posvel" => Ok(ModelKind::PosVel),
            "position" => Ok(ModelKind::Position),
            "position_no_threshold" | "no_threshold" => Ok(ModelKind::PositionNoThreshold),
            other => Err(FlockError::config(
                "model",
                format!(
                    "unknown model `{other}` (expected pos_vel, position or position_no_threshold)"
                ),
            )),
        }
    }
}

/// Full description of one experiment. Defaults reproduce the 50-agent
/// planar setup: r = 7.5 m, v_max = 5 m/s, t_vmax = 1 s, k = 0.1 1/s,
/// 100 s horizon, initial positions in a 25 m box, initial speeds <= 1 m/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model: ModelKind,
    pub n: usize,
    pub m: usize,
    /// Interaction radius, m.
    pub r: f64,
    /// Maximum speed, m/s.
    pub v_max: f64,
    /// Time to reach `v_max`, s.
    pub t_vmax: f64,
    /// Threshold coefficient, 1/s. Only the `Position` model reads it.
    pub k: f64,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Side of the initial hypercube, m.
    pub init_box: f64,
    /// Maximum initial speed, m/s.
    pub v0_max: f64,
    pub snapshot_times: Vec<f64>,
    pub metrics_stride: usize,
    /// Emit a full trajectory row every this many steps; 0 disables tracing.
    pub trace_stride: usize,
    pub out_dir: PathBuf,
}

pub(crate) const DEFAULT_T_END: f64 = 100.0;

/// Snapshots at 0, 1/4, 1/2, 3/4 and 1 of the horizon.
pub fn default_snapshot_times(t_end: f64) -> Vec<f64> {
    (0..=4).map(|q| t_end * q as f64 / 4.0).collect()
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Position,
            n: 50,
            m: 2,
            r: 7.5,
            v_max: 5.0,
            t_vmax: 1.0,
            k: 0.1,
            dt: 0.01,
            t_end: DEFAULT_T_END,
            seed: 0,
            init_box: 25.0,
            v0_max: 1.0,
            snapshot_times: default_snapshot_times(DEFAULT_T_END),
            metrics_stride: 1,
            trace_stride: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Keys accepted in a config file, in manifest order.
pub const CONFIG_KEYS: [&str; 16] = [
    "model",
    "n",
    "m",
    "r",
    "v_max",
    "t_vmax",
    "k",
    "dt",
    "t_end",
    "seed",
    "init_box",
    "v0_max",
    "snapshot_times",
    "metrics_stride",
    "trace_stride",
    "out_dir",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| FlockError::config(key, format!("`{}` is not a valid number", value.trim())))
}

pub(crate) fn parse_time_list(key: &str, value: &str) -> Result<Vec<f64>> {
    let value = value.trim();
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|t| parse_num(key, t)).collect()
}

impl SimConfig {
    /// Sets the horizon and resets snapshots to its quarters.
    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self.snapshot_times = default_snapshot_times(t_end);
        self
    }

    /// Acceleration saturation `v_max / t_vmax`, m/s^2.
    pub fn s_sat(&self) -> f64 {
        self.v_max / self.t_vmax
    }

    pub fn step_count(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    /// Assigns one `key=value` setting. Does not validate cross-field invariants.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model = value.parse()?,
            "n" => self.n = parse_num(key, value)?,
            "m" => self.m = parse_num(key, value)?,
            "r" => self.r = parse_num(key, value)?,
            "v_max" => self.v_max = parse_num(key, value)?,
            "t_vmax" => self.t_vmax = parse_num(key, value)?,
            "k" => self.k = parse_num(key, value)?,
            "dt" => self.dt = parse_num(key, value)?,
            "t_end" => self.t_end = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "init_box" => self.init_box = parse_num(key, value)?,
            "v0_max" => self.v0_max = parse_num(key, value)?,
            "snapshot_times" => self.snapshot_times = parse_time_list(key, value)?,
            "metrics_stride" => self.metrics_stride = parse_num(key, value)?,
            "trace_stride" => self.trace_stride = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            _ => return Err(FlockError::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Current value of `key` as it is written to a manifest.
    pub fn get(&self, key: &str) -> Option<String> {
        let v = match key {
            "model" => self.model.to_string(),
            "n" => self.n.to_string(),
            "m" => self.m.to_string(),
            "r" => self.r.to_string(),
            "v_max" => self.v_max.to_string(),
            "t_vmax" => self.t_vmax.to_string(),
            "k" => self.k.to_string(),
            "dt" => self.dt.to_string(),
            "t_end" => self.t_end.to_string(),
            "seed" => self.seed.to_string(),
            "init_box" => self.init_box.to_string(),
            "v0_max" => self.v0_max.to_string(),
            "snapshot_times" => self
                .snapshot_times
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            "metrics_stride" => self.metrics_stride.to_string(),
            "trace_stride" => self.trace_stride.to_string(),
            "out_dir" => self.out_dir.display().to_string(),
            _ => return None,
        };
        Some(v)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(FlockError::config(
                    key,
                    format!("must be finite and > 0, got {v}"),
                ))
            }
        }

        if self.n < 2 {
            return Err(FlockError::config(
                "n",
                format!("must be >= 2, got {}", self.n),
            ));
        }
        if self.m < 1 {
            return Err(FlockError::config("m", "must be >= 1"));
        }
        positive("r", self.r)?;
        positive("v_max", self.v_max)?;
        positive("t_vmax", self.t_vmax)?;
        positive("k", self.k)?;
        positive("dt", self.dt)?;
        positive("init_box", self.init_box)?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(FlockError::config(
                "t_end",
                format!("must be finite and >= 0, got {}", self.t_end),
            ));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return Err(FlockError::config(
                "dt",
                format!("must not exceed t_end ({} > {})", self.dt, self.t_end),
            ));
        }
        if !(self.v0_max.is_finite() && self.v0_max >= 0.0) {
            return Err(FlockError::config(
                "v0_max",
                format!("must be finite and >= 0, got {}", self.v0_max),
            ));
        }
        if !(self.s_sat() > 0.0 && self.s_sat().is_finite()) {
            return Err(FlockError::config(
                "t_vmax",
                "v_max / t_vmax must be finite and > 0",
            ));
        }
        if self.metrics_stride < 1 {
            return Err(FlockError::config("metrics_stride", "must be >= 1"));
        }
        for &t in &self.snapshot_times {
            if !(t.is_finite() && (0.0..=self.t_end).contains(&t)) {
                return Err(FlockError::config(
                    "snapshot_times",
                    format!("time {t} outside [0, {}]", self.t_end),
                ));
            }
        }
        Ok(())
    }
}
