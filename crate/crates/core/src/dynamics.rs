//! Interaction weights and per-agent accelerations.
//!
//! Every sum runs over `N_i` in ascending neighbor id, so a given state
//! always produces bit-identical accelerations.

use crate::config::{ModelKind, SimConfig};
use crate::neighborhood::NeighborTable;
use crate::state::AgentState;
use crate::vector::VectorM;

/// Distances below this are clamped inside [`psi_weight`], m.
pub const MIN_PSI_DISTANCE: f64 = 1e-9;

/// Cohesion-separation weight `1 - |N_i| / d`.
///
/// Negative (repulsive) for `d < |N_i|`, positive (attractive) above, zero
/// at the equilibrium spacing `d = |N_i|`.
pub fn psi_weight(dist: f64, nbr_count: usize) -> f64 {
    1.0 - nbr_count as f64 / dist.max(MIN_PSI_DISTANCE)
}

/// Velocity consensus weight `1 / |N_i|`.
pub fn phi_weight(nbr_count: usize) -> f64 {
    1.0 / nbr_count as f64
}

/// Position-based alignment weight.
///
/// `t` must be positive; callers guard `t = 0` with [`effective_time`].
/// Thresholded: `-max(|N_i|/t, k|N_i|)`; otherwise `-|N_i|/t`.
pub fn phi_hat_weight(t: f64, nbr_count: usize, k: f64, thresholded: bool) -> f64 {
    let count = nbr_count as f64;
    let decaying = count / t;
    if thresholded {
        -decaying.max(k * count)
    } else {
        -decaying
    }
}

/// `max(t, dt)`: the displacement bracket vanishes at t = 0, so any finite
/// weight works there.
pub fn effective_time(t: f64, dt: f64) -> f64 {
    t.max(dt)
}

/// Acceleration of agent `i` under the position-velocity model:
/// `sum psi(d_ij)(p_j - p_i) + sum (1/|N_i|)(v_j - v_i)`.
pub fn accel_pos_vel(agents: &[AgentState], table: &NeighborTable, i: usize) -> VectorM {
    let me = &agents[i];
    let mut acc = VectorM::zeros(me.position.dim());
    let nbrs = table.neighbors(i);
    if nbrs.is_empty() {
        return acc;
    }
    let count = nbrs.len();
    let phi = phi_weight(count);
    for &j in nbrs {
        let other = &agents[j];
        let rel = &other.position - &me.position;
        acc.add_scaled(psi_weight(rel.norm(), count), &rel);
        let rel_v = &other.velocity - &me.velocity;
        acc.add_scaled(phi, &rel_v);
    }
    acc
}

/// Acceleration of agent `i` under the position-only model, in the
/// grouping `sum psi_hat(d_ij)(p_j - p_i) + sum phi_hat (p_j(0) - p_i(0))`
/// with `psi_hat = psi - phi_hat`.
///
/// `t` is the current time; it is floored at `dt` before entering the weight.
pub fn accel_position(
    agents: &[AgentState],
    table: &NeighborTable,
    i: usize,
    t: f64,
    dt: f64,
    k: f64,
    thresholded: bool,
) -> VectorM {
    let me = &agents[i];
    let mut acc = VectorM::zeros(me.position.dim());
    let nbrs = table.neighbors(i);
    if nbrs.is_empty() {
        return acc;
    }
    let count = nbrs.len();
    let phi_hat = phi_hat_weight(effective_time(t, dt), count, k, thresholded);
    for &j in nbrs {
        let other = &agents[j];
        let rel = &other.position - &me.position;
        let psi_hat = psi_weight(rel.norm(), count) - phi_hat;
        acc.add_scaled(psi_hat, &rel);
        let rel0 = other.initial_position() - me.initial_position();
        acc.add_scaled(phi_hat, &rel0);
    }
    acc
}

/// Dispatches on `config.model`.
pub fn accel(
    agents: &[AgentState],
    table: &NeighborTable,
    i: usize,
    t: f64,
    config: &SimConfig,
) -> VectorM {
    match config.model {
        ModelKind::PosVel => accel_pos_vel(agents, table, i),
        ModelKind::Position => accel_position(agents, table, i, t, config.dt, config.k, true),
        ModelKind::PositionNoThreshold => {
            accel_position(agents, table, i, t, config.dt, config.k, false)
        }
    }
}
