use super::expectation::exact_expected_counts;
use crate::asymptotics::pk_table;
use crate::error::{Error, Result};
use crate::model::GraphState;
use crate::params::ModelParams;

/// What the empirical proportions are centered on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// The limiting proportion `p_k`.
    Theoretical,
    /// The exact finite-time mean `E[N_k] / t`.
    #[default]
    ExactMean,
}

/// `√t (N_k / t - c_k)` for `k` in `m..=kmax` at graph time `t`, i.e. the
/// graph `PA_t` whose last vertex is `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationVector {
    m: usize,
    time: usize,
    entries: Vec<f64>,
}

impl FluctuationVector {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kmax(&self) -> usize {
        self.m + self.entries.len() - 1
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> f64 {
        self.entries[k - self.m]
    }
}

/// Centers `c_k` for one graph time, computed once and reused for every
/// replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Centers {
    m: usize,
    time: usize,
    values: Vec<f64>,
}

impl Centers {
    pub fn new(params: &ModelParams<f64>, time: usize, kmax: usize, centering: Centering) -> Result<Self> {
        let m = params.m();
        if kmax < m {
            return Err(Error::InvalidInput(format!("kmax = {kmax} below m = {m}")));
        }
        if time == 0 {
            return Err(Error::InvalidInput("graph time must be at least 1".into()));
        }
        let values = match centering {
            Centering::Theoretical => pk_table(params, kmax),
            Centering::ExactMean => {
                let table = exact_expected_counts(params, time + 1, 0, kmax)?;
                table.values().iter().map(|e| e / time as f64).collect()
            }
        };
        Ok(Self { m, time, values })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fluctuation of a state whose last completed graph is `PA_time`.
    pub fn fluctuation(&self, state: &GraphState) -> Result<FluctuationVector> {
        if !state.at_boundary() || state.completed_time() != self.time {
            return Err(Error::ShapeMismatch(format!(
                "state at ({}, {}) but centers for time {}",
                state.s(),
                state.i(),
                self.time
            )));
        }
        if state.m() != self.m {
            return Err(Error::ShapeMismatch(format!("state m = {}, centers m = {}", state.m(), self.m)));
        }
        let t = self.time as f64;
        let root = t.sqrt();
        let entries = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, c)| root * (state.count(idx + self.m) as f64 / t - c))
            .collect();
        Ok(FluctuationVector { m: self.m, time: self.time, entries })
    }
}

/// Fluctuation vector of a state at an arrival boundary.
pub fn fluctuation_vector(
    state: &GraphState,
    params: &ModelParams<f64>,
    kmax: usize,
    centering: Centering,
) -> Result<FluctuationVector> {
    Centers::new(params, state.completed_time(), kmax, centering)?.fluctuation(state)
}
