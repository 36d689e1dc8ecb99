//! Fixed-step semi-implicit Euler integration and the experiment loop.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::dynamics::accel;
use crate::error::{FlockError, Result};
use crate::metrics::{compute_row, MetricsRow};
use crate::rng::RandomSource;
use crate::state::{init_flock, AgentState, SimState};
use crate::vector::VectorM;

/// Minimum agents per rayon task; small flocks stay on one thread.
const PAR_MIN_LEN: usize = 64;

/// Rescales `a` to magnitude `s_sat` when it exceeds it.
pub fn clamp_accel(a: &VectorM, s_sat: f64) -> VectorM {
    let norm = a.norm();
    if norm <= s_sat {
        a.clone()
    } else {
        a.scaled(s_sat / norm)
    }
}

/// Maps speed `|v|` to `v_max * tanh(|v| / v_max)`, keeping direction.
pub fn saturate_speed(v: &VectorM, v_max: f64) -> VectorM {
    let speed = v.norm();
    if speed == 0.0 {
        return v.clone();
    }
    v.scaled(v_max * (speed / v_max).tanh() / speed)
}

/// Step indices for a run; time at step `q` is `q * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub dt: f64,
    pub step_count: u64,
    pub current_step: u64,
}

impl StepSchedule {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            dt: config.dt,
            step_count: config.step_count(),
            current_step: 0,
        }
    }

    pub fn time(&self) -> f64 {
        self.current_step as f64 * self.dt
    }

    /// Step index nearest to time `t`, capped at the last step.
    pub fn nearest_step(&self, t: f64) -> u64 {
        ((t / self.dt).round() as u64).min(self.step_count)
    }

    pub fn is_done(&self) -> bool {
        self.current_step >= self.step_count
    }
}

fn check_finite(v: &VectorM, quantity: &'static str, agent: usize, step: u64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(FlockError::NonFinite {
            quantity,
            agent,
            step,
        })
    }
}

fn advance_agent(state: &SimState, i: usize, config: &SimConfig) -> Result<AgentState> {
    let agents = state.agents();
    let step = state.step_index();
    let dt = config.dt;

    let a = accel(agents, state.neighbors(), i, state.time(), config);
    check_finite(&a, "acceleration", i, step)?;
    let a = clamp_accel(&a, config.s_sat());

    let me = &agents[i];
    let mut v = me.velocity.clone();
    v.add_scaled(dt, &a);
    let v = saturate_speed(&v, config.v_max);
    check_finite(&v, "velocity", i, step)?;

    let mut p = me.position.clone();
    p.add_scaled(dt, &v);
    check_finite(&p, "position", i, step)?;

    Ok(AgentState::with_initial_position(
        i,
        p,
        v,
        me.initial_position().clone(),
    ))
}

/// Advances every agent by one step from the same pre-step snapshot.
///
/// Sub-step order per agent: acceleration from the current neighbor table
/// and time, magnitude clamp to `s_sat`, `v += a dt`, tanh speed
/// saturation, `p += v dt`. The neighbor table is then rebuilt for the new
/// positions.
pub fn step(state: &mut SimState, config: &SimConfig) -> Result<()> {
    let updated: Vec<Result<AgentState>> = (0..state.len())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|i| advance_agent(state, i, config))
        .collect();
    // First failing agent in id order, independent of scheduling.
    let agents = updated.into_iter().collect::<Result<Vec<_>>>()?;
    state.advance(agents);
    Ok(())
}

/// Receives run output as it is produced.
pub trait Sink {
    fn metrics(&mut self, row: &MetricsRow) -> Result<()>;

    /// `t` is the requested snapshot time, not the step time.
    fn snapshot(&mut self, t: f64, state: &SimState) -> Result<()>;

    fn trace(&mut self, _state: &SimState) -> Result<()> {
        Ok(())
    }
}

/// Keeps everything in memory.
#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub rows: Vec<MetricsRow>,
    pub snapshots: Vec<(f64, SimState)>,
    pub traces: Vec<SimState>,
}

impl Sink for MemorySink {
    fn metrics(&mut self, row: &MetricsRow) -> Result<()> {
        self.rows.push(row.clone());
        Ok(())
    }

    fn snapshot(&mut self, t: f64, state: &SimState) -> Result<()> {
        self.snapshots.push((t, state.clone()));
        Ok(())
    }

    fn trace(&mut self, state: &SimState) -> Result<()> {
        self.traces.push(state.clone());
        Ok(())
    }
}

/// Records only metrics rows.
#[derive(Debug, Default, Clone)]
pub struct MetricsOnly {
    pub rows: Vec<MetricsRow>,
}

impl Sink for MetricsOnly {
    fn metrics(&mut self, row: &MetricsRow) -> Result<()> {
        self.rows.push(row.clone());
        Ok(())
    }

    fn snapshot(&mut self, _t: f64, _state: &SimState) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub final_gamma: Option<f64>,
    pub final_min_separation: Option<f64>,
    /// Largest agent speed seen at any step boundary.
    pub max_speed: f64,
    pub wall_time: Duration,
}

/// Initializes a flock from `config.seed` and integrates it to `t_end`,
/// emitting metrics every `metrics_stride` steps, snapshots at the steps
/// nearest each requested time, and trace states every `trace_stride` steps.
pub fn run(config: &SimConfig, sink: &mut dyn Sink) -> Result<RunSummary> {
    config.validate()?;
    let started = Instant::now();

    let mut rng = RandomSource::new(config.seed);
    let mut state = init_flock(config, &mut rng)?;
    let mut schedule = StepSchedule::new(config);

    let mut snapshots: Vec<(u64, f64)> = config
        .snapshot_times
        .iter()
        .map(|&t| (schedule.nearest_step(t), t))
        .collect();
    snapshots.sort_by_key(|&(q, _)| q);
    let mut next_snapshot = 0;

    let stride = config.metrics_stride as u64;
    let trace_stride = config.trace_stride as u64;
    let mut max_speed: f64 = 0.0;
    let mut last_row = None;

    loop {
        let q = schedule.current_step;
        max_speed = max_speed.max(state.max_speed());

        if q.is_multiple_of(stride) {
            let row = compute_row(&state);
            sink.metrics(&row)?;
            last_row = Some(row);
        }
        while next_snapshot < snapshots.len() && snapshots[next_snapshot].0 == q {
            sink.snapshot(snapshots[next_snapshot].1, &state)?;
            next_snapshot += 1;
        }
        if trace_stride > 0 && q.is_multiple_of(trace_stride) {
            sink.trace(&state)?;
        }

        if schedule.is_done() {
            break;
        }
        step(&mut state, config)?;
        schedule.current_step += 1;
        debug_assert_eq!(schedule.current_step, state.step_index());
    }

    let final_row = if last_row.as_ref().map(|r| r.step) == Some(schedule.current_step) {
        last_row.unwrap()
    } else {
        compute_row(&state)
    };

    Ok(RunSummary {
        steps: schedule.current_step,
        final_gamma: final_row.gamma,
        final_min_separation: final_row.min_separation,
        max_speed,
        wall_time: started.elapsed(),
    })
}
