//! The generative model: graph state, attachment probabilities, samplers and
//! the arrival loop.

mod sampler;
mod state;

pub use sampler::{
    attachment_distribution, sample_target_exact, sample_target_fast, REJECTION_CAP,
};
pub use state::GraphState;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Generator used for every replication.
pub type ModelRng = Xoshiro256PlusPlus;

/// Seed of replication `index` under `master`. Depends only on the pair, so
/// replications can be scheduled on any worker in any order.
pub fn replication_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    // splitmix64 finalizer, twice to decorrelate neighbouring indices
    for _ in 0..2 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// A single replication: parameters, state and its private generator.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: ModelParams<f64>,
    state: GraphState,
    rng: ModelRng,
}

impl Simulation {
    /// Starts from the seed graph.
    pub fn new(params: ModelParams<f64>, seed: u64) -> Self {
        let state = GraphState::initial(&params);
        Self { params, state, rng: ModelRng::seed_from_u64(seed) }
    }

    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }

    pub fn state(&self) -> &GraphState {
        &self.state
    }

    pub fn into_state(self) -> GraphState {
        self.state
    }

    /// Draws and attaches one edge. Returns `true` if it completed an arrival.
    pub fn step_edge(&mut self) -> Result<bool> {
        let target = sample_target_fast(&self.state, &self.params, &mut self.rng)?;
        self.state.attach_edge(target)
    }

    /// Adds one vertex with all of its `m` edges.
    pub fn step_arrival(&mut self) -> Result<()> {
        while !self.step_edge()? {}
        Ok(())
    }

    /// Runs arrivals until the last completed graph is `PA_time`. A no-op if
    /// that time has already been reached.
    pub fn advance_to(&mut self, time: usize) -> Result<()> {
        while self.state.completed_time() < time {
            self.step_arrival()?;
        }
        Ok(())
    }

    pub fn run_to(mut self, time: usize) -> Result<Self> {
        self.advance_to(time)?;
        Ok(self)
    }
}

/// Grows `PA_steps` from the seed graph `PA_1`.
pub fn simulate(params: &ModelParams<f64>, steps: usize, seed: u64) -> Result<GraphState> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    Ok(Simulation::new(params.clone(), seed).run_to(steps)?.into_state())
}

/// Grows the graph up to the largest of `times`, calling `observe` with the
/// state each time a requested time is reached. `times` need not be sorted.
pub fn simulate_snapshots<F>(
    params: &ModelParams<f64>,
    times: &[usize],
    seed: u64,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(usize, &GraphState),
{
    if times.is_empty() || times.contains(&0) {
        return Err(Error::InvalidInput("snapshot times must be non-empty and positive".into()));
    }
    let mut order: Vec<usize> = times.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut sim = Simulation::new(params.clone(), seed);
    for t in order {
        sim.advance_to(t)?;
        observe(t, sim.state());
    }
    Ok(())
}
