use crate::config::SimConfig;
use crate::error::{FlockError, Result};
use crate::neighborhood::{build_neighbors_grid, NeighborTable};
use crate::rng::RandomSource;
use crate::vector::VectorM;

/// Minimum spacing between initial positions, m.
pub const MIN_INITIAL_SPACING: f64 = 1e-3;
/// Placement attempts per agent before initialization gives up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub position: VectorM,
    pub velocity: VectorM,
    initial_position: VectorM,
}

impl AgentState {
    /// New agent whose initial position is its current position.
    pub fn new(id: usize, position: VectorM, velocity: VectorM) -> Self {
        let initial_position = position.clone();
        Self {
            id,
            position,
            velocity,
            initial_position,
        }
    }

    /// Agent part-way through a run, with a separately recorded `p(0)`.
    pub fn with_initial_position(
        id: usize,
        position: VectorM,
        velocity: VectorM,
        initial_position: VectorM,
    ) -> Self {
        Self {
            id,
            position,
            velocity,
            initial_position,
        }
    }

    pub fn initial_position(&self) -> &VectorM {
        &self.initial_position
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }
}

/// All agents at one step boundary, with the neighbor table of their
/// current positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    agents: Vec<AgentState>,
    step: u64,
    dt: f64,
    r: f64,
    neighbors: NeighborTable,
}

impl SimState {
    /// State at step 0. Agent ids must equal their index.
    pub fn new(agents: Vec<AgentState>, dt: f64, r: f64) -> Self {
        debug_assert!(agents.iter().enumerate().all(|(i, a)| a.id == i));
        let neighbors = build_neighbors_grid(&positions_of(&agents), r);
        Self {
            agents,
            step: 0,
            dt,
            r,
            neighbors,
        }
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Simulation time, computed as `step * dt` rather than accumulated.
    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn neighbors(&self) -> &NeighborTable {
        &self.neighbors
    }

    pub fn positions(&self) -> Vec<&VectorM> {
        positions_of(&self.agents)
    }

    pub fn max_speed(&self) -> f64 {
        self.agents
            .iter()
            .map(AgentState::speed)
            .fold(0.0, f64::max)
    }

    /// Installs the post-step agents and refreshes the neighbor table.
    pub(crate) fn advance(&mut self, agents: Vec<AgentState>) {
        self.neighbors = build_neighbors_grid(&positions_of(&agents), self.r);
        self.agents = agents;
        self.step += 1;
    }
}

fn positions_of(agents: &[AgentState]) -> Vec<&VectorM> {
    agents.iter().map(|a| &a.position).collect()
}

/// Uniform direction on the unit sphere in `m` dimensions.
///
/// m = 1 draws one uniform for the sign, m = 2 one uniform for the angle,
/// m >= 3 normalizes `m` Box-Muller normals (`ceil(m/2)` pairs).
fn random_direction(m: usize, rng: &mut RandomSource) -> VectorM {
    match m {
        1 => {
            let sign = if rng.next_uniform() < 0.5 { -1.0 } else { 1.0 };
            VectorM::new(vec![sign])
        }
        2 => {
            let angle = std::f64::consts::TAU * rng.next_uniform();
            VectorM::new(vec![angle.cos(), angle.sin()])
        }
        _ => loop {
            let mut comps = Vec::with_capacity(m + 1);
            while comps.len() < m {
                let (a, b) = rng.next_normal_pair();
                comps.push(a);
                comps.push(b);
            }
            comps.truncate(m);
            let v = VectorM::new(comps);
            let norm = v.norm();
            if norm > 0.0 {
                break v.scaled(1.0 / norm);
            }
        },
    }
}

/// Random initial flock.
///
/// Draw order: every position first (agent by agent, component by
/// component, including resampling draws), then every velocity (agent by
/// agent, direction draws then one speed draw).
pub fn init_flock(config: &SimConfig, rng: &mut RandomSource) -> Result<SimState> {
    let (n, m) = (config.n, config.m);
    let min_sq = MIN_INITIAL_SPACING * MIN_INITIAL_SPACING;

    let mut positions: Vec<VectorM> = Vec::with_capacity(n);
    for agent in 0..n {
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let candidate = VectorM::new(
                (0..m)
                    .map(|_| rng.next_uniform() * config.init_box)
                    .collect(),
            );
            if positions
                .iter()
                .all(|p| p.distance_squared(&candidate) >= min_sq)
            {
                placed = Some(candidate);
                break;
            }
        }
        match placed {
            Some(p) => positions.push(p),
            None => {
                return Err(FlockError::Init {
                    agent,
                    attempts: MAX_PLACEMENT_ATTEMPTS,
                    min_spacing: MIN_INITIAL_SPACING,
                })
            }
        }
    }

    let agents = positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| {
            let direction = random_direction(m, rng);
            let speed = config.v0_max * rng.next_uniform();
            AgentState::new(id, position, direction.scaled(speed))
        })
        .collect();

    Ok(SimState::new(agents, config.dt, config.r))
}
