//! Target selection for the next edge of the arriving vertex.
//!
//! A vertex `v < s` is chosen with probability `(deg(v) + δ) / normalizer`.
//! [`sample_target_exact`] walks the explicit distribution and is only meant
//! as a reference; [`sample_target_fast`] draws from the endpoint pool in
//! expected O(1).

use rand::Rng;

use super::state::GraphState;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Proposal cap for the rejection sampler. Reaching it means the state is
/// corrupt, since the acceptance probability is at least `(m + δ) / m`
/// for the first proposal that hits a minimum-degree vertex.
pub const REJECTION_CAP: usize = 1_000_000;

/// Probability of each old vertex `0..s` receiving the next edge.
pub fn attachment_distribution<T: Scalar>(state: &GraphState, params: &ModelParams<T>) -> Vec<T> {
    let norm = state.normalizer(params);
    state.degrees()[..state.s()]
        .iter()
        .map(|&d| params.weight(d as usize) / norm.clone())
        .collect()
}

/// Linear scan over the explicit weights. O(s) per draw.
pub fn sample_target_exact<R: Rng + ?Sized>(
    state: &GraphState,
    params: &ModelParams<f64>,
    rng: &mut R,
) -> usize {
    let delta = *params.delta();
    let weights = state.degrees()[..state.s()].iter().map(move |&d| f64::from(d) + delta);
    scan(weights, rng.random::<f64>())
}

/// Index selected by the uniform `u01` in `[0, 1)` when walking the
/// cumulative sums of `weights`.
fn scan<I: Iterator<Item = f64> + Clone>(weights: I, u01: f64) -> usize {
    let total: f64 = weights.clone().sum();
    let target = u01 * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (v, w) in weights.enumerate() {
        acc += w;
        if w > 0.0 {
            last_positive = v;
            if target < acc {
                return v;
            }
        }
    }
    // target fell in the rounding gap at the top
    last_positive
}

/// Pool-based sampler.
///
/// For `δ >= 0` the weight splits as `deg(v)` plus `δ`: with probability
/// `Σ deg / normalizer` a uniform pool entry is taken, otherwise a uniform
/// old vertex. For `δ < 0` a uniform pool entry of degree `k` is accepted
/// with probability `(k + δ) / k`.
pub fn sample_target_fast<R: Rng + ?Sized>(
    state: &GraphState,
    params: &ModelParams<f64>,
    rng: &mut R,
) -> Result<usize> {
    let delta = *params.delta();
    let pool = state.endpoint_pool();
    if delta >= 0.0 {
        if delta > 0.0 {
            let degree_mass = pool.len() as f64;
            let uniform_mass = delta * state.s() as f64;
            if rng.random::<f64>() * (degree_mass + uniform_mass) >= degree_mass {
                return Ok(rng.random_range(0..state.s()));
            }
        }
        return Ok(pool[rng.random_range(0..pool.len())] as usize);
    }
    for _ in 0..REJECTION_CAP {
        let v = pool[rng.random_range(0..pool.len())] as usize;
        let k = f64::from(state.degrees()[v]);
        if rng.random::<f64>() * k < k + delta {
            return Ok(v);
        }
    }
    Err(Error::SamplerStalled(REJECTION_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Simulation;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn params(m: usize, delta: f64) -> ModelParams<f64> {
        ModelParams::new(m, delta).unwrap()
    }

    #[test]
    fn seed_graph_is_symmetric() {
        let p = params(1, 0.0);
        let st = GraphState::initial(&p);
        assert_eq!(attachment_distribution(&st, &p), vec![0.5, 0.5]);
    }

    #[test]
    fn hand_evaluated_distribution() {
        let p = params(1, 0.0);
        let mut st = GraphState::initial(&p);
        st.attach_edge(0).unwrap();
        assert_eq!(attachment_distribution(&st, &p), vec![0.5, 0.25, 0.25]);
    }

    #[test]
    fn distribution_sums_to_one() {
        for (m, delta) in [(1, -0.9), (2, 0.0), (3, 5.0)] {
            let p = params(m, delta);
            let st = Simulation::new(p.clone(), 11).run_to(60).unwrap().into_state();
            let total: f64 = attachment_distribution(&st, &p).iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            // the arriving vertex is not a candidate
            assert_eq!(attachment_distribution(&st, &p).len(), st.s());
        }
    }

    #[test]
    fn exact_sampler_seed_graph_frequency() {
        let p = params(1, 0.0);
        let st = GraphState::initial(&p);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        let draws = 1_000_000;
        let zeros = (0..draws).filter(|_| sample_target_exact(&st, &p, &mut rng) == 0).count();
        let freq = zeros as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.002, "freq = {freq}");
    }

    #[test]
    fn single_positive_weight_is_certain() {
        for k in 0..1000 {
            let u = k as f64 / 1000.0;
            assert_eq!(scan([0.0, 3.0].into_iter(), u), 1);
            assert_eq!(scan([2.0, 0.0].into_iter(), u), 0);
        }
        assert_eq!(scan([1.0, 1.0].into_iter(), 0.999_999_999_999), 1);
    }

    #[test]
    fn zero_delta_draws_only_from_pool() {
        let p = params(2, 0.0);
        let st = Simulation::new(p.clone(), 3).run_to(30).unwrap().into_state();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let mut hits = vec![0usize; st.s()];
        let draws = 200_000;
        for _ in 0..draws {
            hits[sample_target_fast(&st, &p, &mut rng).unwrap()] += 1;
        }
        let dist = attachment_distribution(&st, &p);
        for (v, &h) in hits.iter().enumerate() {
            let expected = dist[v] * draws as f64;
            let sd = (expected * (1.0 - dist[v])).sqrt();
            assert!((h as f64 - expected).abs() < 5.0 * sd + 1.0, "vertex {v}");
        }
    }

    #[test]
    fn negative_delta_rejection_terminates() {
        let p = params(1, -0.999);
        let st = Simulation::new(p.clone(), 9).run_to(500).unwrap().into_state();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        for _ in 0..10_000 {
            let v = sample_target_fast(&st, &p, &mut rng).unwrap();
            assert!(v < st.s());
        }
    }
}
