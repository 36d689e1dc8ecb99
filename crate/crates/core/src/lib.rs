//! Deterministic multi-agent flocking simulator.
//!
//! Three interaction models are provided (see [`ModelKind`]):
//!
//! - `PosVel`: cohesion-separation on relative positions plus velocity
//!   consensus on relative velocities.
//! - `Position`: the same cohesion-separation term, with alignment driven
//!   only by the drift of relative positions away from their initial values,
//!   weighted by `max(|N_i|/t, k|N_i|)`.
//! - `PositionNoThreshold`: the position-only rule with the decaying
//!   weight `|N_i|/t` and no floor.
//!
//! Runs are pure functions of their [`SimConfig`]: the random source is
//! SplitMix64 with a fixed draw order, neighbor lists are sorted, and force
//! sums use ascending neighbor ids, so results do not depend on the number
//! of worker threads.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod integrator;
pub mod io;
pub mod metrics;
pub mod neighborhood;
pub mod rng;
pub mod state;
pub mod vector;

pub use config::{ModelKind, SimConfig};
pub use error::{FlockError, Result};
pub use integrator::{run, step, RunSummary, Sink};
pub use metrics::MetricsRow;
pub use neighborhood::NeighborTable;
pub use rng::RandomSource;
pub use state::{init_flock, AgentState, SimState};
pub use vector::VectorM;
