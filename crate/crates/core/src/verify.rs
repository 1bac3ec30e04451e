//! The property suite: each check reduces to a worst-case residual that is
//! compared to a fixed tolerance.

use rand::{Rng, SeedableRng};

use crate::asymptotics::{rz_matrix_with, sigma_via_transform_with, Clock, TransformMatrices};
use crate::error::{Error, Result};
use crate::experiment::run_replications;
use crate::martingale::{check_condizioni, coeff_a, one_step_expectation_check, regvar_exponent};
use crate::model::{replication_seed, sample_target_exact, sample_target_fast, GraphState, ModelRng, Simulation};
use crate::params::ModelParams;
use crate::scalar::{relative_difference, Scalar};
use crate::stats::chi_square_two_sample;
use crate::Params;

/// Deliberate corruption used to confirm that a check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negates the closed-form covariance before it is compared.
    RzSignFlip,
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub params: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    fn upper(check: &'static str, params: &Params, residual: f64, tolerance: f64) -> Self {
        Self { check, params: label(params), residual, tolerance, passed: residual <= tolerance }
    }

    /// `pass` or `fail`.
    pub fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

/// `m=2;delta=-1.8`
pub fn label(params: &Params) -> String {
    format!("m={};delta={}", params.m(), params.delta())
}

/// The parameter grid `m ∈ {1, 2, 3}`, `δ ∈ {-0.9m, 0, 1, 5}`.
pub fn default_grid() -> Vec<Params> {
    let mut out = Vec::new();
    for m in 1..=3usize {
        for delta in [-0.9 * m as f64, 0.0, 1.0, 5.0] {
            out.push(ModelParams::new(m, delta).expect("valid grid point"));
        }
    }
    out
}

/// Settings of [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub grid: Vec<Params>,
    /// Replications and final time of the invariant check.
    pub invariant_reps: usize,
    pub invariant_steps: usize,
    /// Random states per parameter set for the sampler comparison.
    pub sampler_states: usize,
    pub sampler_draws: usize,
    /// Random states per parameter set for the martingale checks.
    pub martingale_states: usize,
    pub martingale_kmax: usize,
    /// Degree range `[m, covariance_kmax]` of the covariance checks.
    pub covariance_kmax: usize,
    pub identity_kmax: usize,
    pub regvar_kmax: usize,
    pub seed: u64,
    pub workers: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            invariant_reps: 4,
            invariant_steps: 2000,
            sampler_states: 1,
            sampler_draws: 200_000,
            martingale_states: 20,
            martingale_kmax: 10,
            covariance_kmax: 12,
            identity_kmax: 30,
            regvar_kmax: 10,
            seed: 1,
            workers: 0,
            fault: None,
        }
    }
}

/// Largest relative gap between `Σ_j (j + δ) N_j`, taken from the counts,
/// and `s(2m + δ) - 2m + i`, over every sub-step of one replication grown
/// to `steps`. The structural invariants are checked on the final state.
pub fn invariant_residual(params: &Params, steps: usize, seed: u64) -> Result<f64> {
    let mut sim = Simulation::new(params.clone(), seed);
    let delta = *params.delta();
    let mut worst = 0.0_f64;
    let mut observe = |st: &GraphState| {
        let (n, d) = st.count_moments();
        let weighted = d as f64 + delta * n as f64;
        let closed: f64 = st.normalizer(params);
        worst = worst.max(relative_difference(&weighted, &closed));
        // the integer moments decide exactly
        if n != st.s() as u64 || d != (2 * params.m() * (st.s() - 1) + st.i()) as u64 {
            worst = worst.max(1.0);
        }
    };
    observe(sim.state());
    while sim.state().completed_time() < steps {
        sim.step_edge()?;
        observe(sim.state());
    }
    sim.state().check_invariants(params)?;
    Ok(worst)
}

/// A reachable state with a random arrival in `2..=s_max` and a random
/// number of its edges already attached.
pub fn random_state(params: &Params, s_max: usize, seed: u64) -> Result<GraphState> {
    if s_max < 2 {
        return Err(Error::InvalidInput("s_max must be at least 2".into()));
    }
    let mut pick = ModelRng::seed_from_u64(seed);
    let s = pick.random_range(2..=s_max);
    let i = pick.random_range(0..params.m());
    let mut sim = Simulation::new(params.clone(), seed ^ 0x5EED).run_to(s - 1)?;
    for _ in 0..i {
        sim.step_edge()?;
    }
    Ok(sim.into_state())
}

/// Two-sample χ² p-value between `draws` targets from the pool sampler and
/// as many from the linear scan, on the same state.
pub fn sampler_agreement(state: &GraphState, params: &Params, draws: usize, seed: u64) -> Result<f64> {
    let mut fast = vec![0u64; state.s()];
    let mut exact = vec![0u64; state.s()];
    let mut rng = ModelRng::seed_from_u64(seed);
    for _ in 0..draws {
        fast[sample_target_fast(state, params, &mut rng)?] += 1;
    }
    for _ in 0..draws {
        exact[sample_target_exact(state, params, &mut rng)] += 1;
    }
    chi_square_two_sample(&fast, &exact)
}

/// Worst residuals of the martingale checks over random reachable states.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MartingaleResiduals {
    pub one_step: f64,
    pub condizioni: f64,
    pub boundary: f64,
    /// `(state, k)` pairs checked.
    pub checked: usize,
    /// Pairs skipped because `a^(k)` is undefined at that position.
    pub degenerate: usize,
}

/// `a_{s,m}` as `a_{s,m-1}` times the last factor of arrival `s`, against
/// `a_{s+1,0}` from its own product.
fn boundary_residual(params: &Params, s: usize, k: usize) -> Result<f64> {
    let m = params.m();
    let before = coeff_a(params, s, m - 1, k)?;
    let norm: f64 = s as f64 * params.growth_rate() - (2 * m) as f64 + (m - 1) as f64;
    let last = before / (1.0 - params.weight(k) / norm);
    let after = coeff_a(params, s + 1, 0, k)?;
    Ok(relative_difference(&last, &after))
}

/// Runs the one-step, compatibility and boundary checks for `k` in
/// `m..=kmax` on `states` random states with `s <= s_max`.
pub fn martingale_residuals(
    params: &Params,
    states: usize,
    s_max: usize,
    kmax: usize,
    seed: u64,
    workers: usize,
) -> Result<MartingaleResiduals> {
    let per_state = run_replications(states, seed, workers, |_, rep_seed| {
        let st = random_state(params, s_max, rep_seed)?;
        let mut out = MartingaleResiduals::default();
        for k in params.m()..=kmax {
            let step = one_step_expectation_check(&st, params, k);
            let cond = check_condizioni(params, st.s(), st.i(), k);
            let edge = boundary_residual(params, st.s(), k);
            match (step, cond, edge) {
                (Ok(a), Ok(b), Ok(c)) => {
                    out.one_step = out.one_step.max(a);
                    out.condizioni = out.condizioni.max(b);
                    out.boundary = out.boundary.max(c);
                    out.checked += 1;
                }
                (Err(Error::DegenerateCoefficient { .. }), _, _)
                | (_, Err(Error::DegenerateCoefficient { .. }), _)
                | (_, _, Err(Error::DegenerateCoefficient { .. })) => out.degenerate += 1,
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return Err(e),
            }
        }
        Ok(out)
    })?;
    Ok(per_state.into_iter().fold(MartingaleResiduals::default(), |acc, r| MartingaleResiduals {
        one_step: acc.one_step.max(r.one_step),
        condizioni: acc.condizioni.max(r.condizioni),
        boundary: acc.boundary.max(r.boundary),
        checked: acc.checked + r.checked,
        degenerate: acc.degenerate + r.degenerate,
    }))
}

/// Largest relative gap between the closed form and `D R_Y Dᵀ` over
/// `[m, kmax]²`, both evaluated in exact rationals.
pub fn cross_path_residual(params: &Params, kmax: usize, clock: Clock, fault: Option<Fault>) -> f64 {
    let exact = params.to_exact();
    let mut direct = rz_matrix_with(&exact, kmax, clock);
    if fault == Some(Fault::RzSignFlip) {
        direct = direct.map(|x| -x.clone());
    }
    let via = sigma_via_transform_with(&exact, kmax, clock);
    let mut worst = 0.0_f64;
    for r in params.m()..=kmax {
        for l in params.m()..=kmax {
            let d = relative_difference(direct.get(r, l), via.get(r, l)).to_f64_lossy();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest `|(CD - I)_{r,l}|` and `|(DC - I)_{r,l}|`, computed exactly.
pub fn identity_residual(params: &Params, kmax: usize) -> f64 {
    TransformMatrices::new(&params.to_exact(), kmax).identity_residual().to_f64_lossy()
}

/// Scaling-coefficient index `μ (k + δ)/(2m + δ)` with `μ` the clock rate.
pub fn regvar_index(params: &Params, k: usize, clock: Clock) -> f64 {
    clock.rate(params) * params.weight(k) / params.growth_rate()
}

/// Eleven log-spaced arrivals from `10^3` to `10^5`.
pub fn regvar_grid() -> Vec<usize> {
    (0..=10).map(|j| 10f64.powf(3.0 + 0.2 * j as f64).round() as usize).collect()
}

/// Worst relative gap between the fitted exponent and [`regvar_index`] for
/// `k` in `m..=kmax`, with the `k` attaining it.
pub fn regvar_residual(params: &Params, kmax: usize, clock: Clock) -> Result<(f64, usize)> {
    let grid = regvar_grid();
    let mut worst = (0.0, params.m());
    for k in params.m()..=kmax {
        let fitted = regvar_exponent(params, k, &grid)?;
        let d = relative_difference(&fitted, &regvar_index(params, k, clock));
        if d > worst.0 {
            worst = (d, k);
        }
    }
    Ok(worst)
}

/// Runs every check for every parameter set.
pub fn run_suite(config: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (set, p) in config.grid.iter().enumerate() {
        let seed = replication_seed(config.seed, set as u64);

        let inv = run_replications(config.invariant_reps, seed, config.workers, |_, s| {
            invariant_residual(p, config.invariant_steps, s)
        })?;
        rows.push(CheckRow::upper("state_invariants", p, inv.into_iter().fold(0.0, f64::max), 1e-9));

        let pvalues = run_replications(config.sampler_states, seed ^ 1, config.workers, |_, s| {
            let st = random_state(p, 100, s)?;
            sampler_agreement(&st, p, config.sampler_draws, s)
        })?;
        let min_p = pvalues.into_iter().fold(1.0, f64::min);
        rows.push(CheckRow {
            check: "sampler_chi2",
            params: label(p),
            residual: min_p,
            tolerance: 1e-3,
            passed: min_p > 1e-3,
        });

        let mart = martingale_residuals(p, config.martingale_states, 200, config.martingale_kmax, seed ^ 2, config.workers)?;
        rows.push(CheckRow::upper("one_step_martingale", p, mart.one_step, 1e-9));
        rows.push(CheckRow::upper("condizioni", p, mart.condizioni, 1e-10));
        rows.push(CheckRow::upper("boundary", p, mart.boundary, 1e-12));

        for (name, clock) in [("cross_path_draw", Clock::Draw), ("cross_path_vertex", Clock::Vertex)] {
            let r = cross_path_residual(p, config.covariance_kmax, clock, config.fault);
            rows.push(CheckRow::upper(name, p, r, 1e-8));
        }

        rows.push(CheckRow::upper("identity_cd", p, identity_residual(p, config.identity_kmax), 1e-10));

        let (reg, _) = regvar_residual(p, config.regvar_kmax, Clock::Vertex)?;
        rows.push(CheckRow::upper("regvar", p, reg, 1e-2));
    }
    Ok(rows)
}
