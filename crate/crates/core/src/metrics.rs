//! Per-sample flock metrics: alignment, minimum separation and
//! neighborhood-size statistics.

use crate::neighborhood::NeighborTable;
use crate::state::{AgentState, SimState};

/// Speeds below this count as zero when computing cosines, m/s.
pub const MIN_SPEED_FOR_COSINE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: u64,
    pub t: f64,
    /// Absent when no agent has a neighbor.
    pub gamma: Option<f64>,
    /// Absent for fewer than two agents.
    pub min_separation: Option<f64>,
    pub mean_nbrs: f64,
    pub min_nbrs: usize,
    pub max_nbrs: usize,
    /// Agents with no neighbors, i.e. left out of `gamma`.
    pub isolated: usize,
}

fn cosine(a: &AgentState, b: &AgentState) -> f64 {
    let (sa, sb) = (a.speed(), b.speed());
    if sa < MIN_SPEED_FOR_COSINE || sb < MIN_SPEED_FOR_COSINE {
        return 0.0;
    }
    (a.velocity.dot(&b.velocity) / (sa * sb)).clamp(-1.0, 1.0)
}

/// Mean over agents with at least one neighbor of the mean cosine
/// similarity between the agent's velocity and each neighbor's.
pub fn alignment_gamma(agents: &[AgentState], table: &NeighborTable) -> Option<f64> {
    let mut total = 0.0;
    let mut counted = 0usize;
    for (i, me) in agents.iter().enumerate() {
        let nbrs = table.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        let inner: f64 = nbrs.iter().map(|&j| cosine(me, &agents[j])).sum();
        total += inner / nbrs.len() as f64;
        counted += 1;
    }
    (counted > 0).then(|| total / counted as f64)
}

/// Smallest distance over all unordered pairs, regardless of radius.
pub fn min_separation(agents: &[AgentState]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..agents.len() {
        for j in i + 1..agents.len() {
            let d2 = agents[i].position.distance_squared(&agents[j].position);
            best = Some(best.map_or(d2, |b| b.min(d2)));
        }
    }
    best.map(f64::sqrt)
}

/// `(mean, min, max)` of `|N_i|`; all zero for an empty table.
pub fn neighborhood_stats(table: &NeighborTable) -> (f64, usize, usize) {
    if table.is_empty() {
        return (0.0, 0, 0);
    }
    let (mut sum, mut lo, mut hi) = (0usize, usize::MAX, 0usize);
    for c in table.counts() {
        sum += c;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (sum as f64 / table.len() as f64, lo, hi)
}

pub fn compute_row(state: &SimState) -> MetricsRow {
    let table = state.neighbors();
    let (mean_nbrs, min_nbrs, max_nbrs) = neighborhood_stats(table);
    MetricsRow {
        step: state.step_index(),
        t: state.time(),
        gamma: alignment_gamma(state.agents(), table),
        min_separation: min_separation(state.agents()),
        mean_nbrs,
        min_nbrs,
        max_nbrs,
        isolated: table.counts().filter(|&c| c == 0).count(),
    }
}

/// Mean of `field` over rows with `t` in `[t0, t1]`, skipping absent values.
pub fn window_mean(
    rows: &[MetricsRow],
    t0: f64,
    t1: f64,
    field: impl Fn(&MetricsRow) -> Option<f64>,
) -> Option<f64> {
    let (sum, count) = rows
        .iter()
        .filter(|r| r.t >= t0 && r.t <= t1)
        .filter_map(&field)
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Population standard deviation of `field` over rows with `t` in `[t0, t1]`.
pub fn window_std(
    rows: &[MetricsRow],
    t0: f64,
    t1: f64,
    field: impl Fn(&MetricsRow) -> Option<f64>,
) -> Option<f64> {
    let mean = window_mean(rows, t0, t1, &field)?;
    window_mean(rows, t0, t1, |r| field(r).map(|v| (v - mean) * (v - mean))).map(f64::sqrt)
}
