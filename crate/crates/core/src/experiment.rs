//! Seeded replications on a worker pool.
//!
//! Replication `i` always uses [`replication_seed`]`(master, i)` and results
//! are reduced in fixed chunks of consecutive indices, merged in index
//! order. The output therefore depends on the master seed only, not on the
//! number of workers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{replication_seed, simulate_snapshots};
use crate::params::ModelParams;
use crate::stats::{Centering, Centers, CovarianceAccumulator, CovarianceEstimate};

/// Replications reduced together before merging.
pub const CHUNK: usize = 64;

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))
}

/// Runs `f(index, seed)` for every replication and returns the results in
/// index order. `workers = 0` lets the pool pick the thread count.
pub fn run_replications<R, F>(reps: usize, master_seed: u64, workers: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize, u64) -> Result<R> + Sync,
{
    pool(workers)?.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|i| f(i, replication_seed(master_seed, i as u64)))
            .collect()
    })
}

/// Settings of a covariance experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceConfig {
    pub params: ModelParams<f64>,
    /// Graph times at which every replication is observed.
    pub times: Vec<usize>,
    pub reps: usize,
    pub kmax: usize,
    pub master_seed: u64,
    pub centering: Centering,
    pub workers: usize,
}

/// Empirical covariance of the fluctuation vectors at each requested time,
/// in the order of `config.times`.
pub fn run_covariance(config: &CovarianceConfig) -> Result<Vec<(usize, CovarianceEstimate)>> {
    let p = &config.params;
    if config.reps < 2 {
        return Err(Error::InsufficientData { have: config.reps, need: 2 });
    }
    if config.times.is_empty() {
        return Err(Error::InvalidInput("no observation times".into()));
    }
    let mut times = config.times.clone();
    times.sort_unstable();
    times.dedup();
    let centers: Vec<Centers> = times
        .iter()
        .map(|&t| Centers::new(p, t, config.kmax, config.centering))
        .collect::<Result<_>>()?;
    let fresh = || vec![CovarianceAccumulator::new(p.m(), config.kmax); times.len()];

    let starts: Vec<usize> = (0..config.reps).step_by(CHUNK).collect();
    let partials: Vec<Vec<CovarianceAccumulator>> = pool(config.workers)?.install(|| {
        starts
            .par_iter()
            .map(|&start| {
                let mut accs = fresh();
                for i in start..(start + CHUNK).min(config.reps) {
                    let seed = replication_seed(config.master_seed, i as u64);
                    let mut failure = None;
                    simulate_snapshots(p, &times, seed, |t, state| {
                        let idx = times.binary_search(&t).expect("requested time");
                        let fv = centers[idx].fluctuation(state).and_then(|fv| accs[idx].accumulate(fv.entries()));
                        if let Err(e) = fv {
                            failure.get_or_insert(e);
                        }
                    })?;
                    if let Some(e) = failure {
                        return Err(e);
                    }
                }
                Ok(accs)
            })
            .collect::<Result<_>>()
    })?;

    let mut total = fresh();
    for part in &partials {
        for (acc, other) in total.iter_mut().zip(part) {
            acc.merge(other)?;
        }
    }
    config
        .times
        .iter()
        .map(|t| {
            let idx = times.binary_search(t).expect("sorted copy");
            Ok((*t, total[idx].finalize()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(workers: usize) -> CovarianceConfig {
        CovarianceConfig {
            params: ModelParams::new(2, 0.5).unwrap(),
            times: vec![200, 50],
            reps: 150,
            kmax: 8,
            master_seed: 11,
            centering: Centering::ExactMean,
            workers,
        }
    }

    #[test]
    fn independent_of_worker_count() {
        let one = run_covariance(&config(1)).unwrap();
        let four = run_covariance(&config(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one[0].0, 200);
        assert_eq!(one[1].0, 50);
        assert_eq!(one[0].1.n, 150);
    }

    #[test]
    fn replications_in_index_order() {
        let out = run_replications(200, 3, 3, |i, seed| Ok((i, seed))).unwrap();
        for (j, (i, seed)) in out.into_iter().enumerate() {
            assert_eq!(i, j);
            assert_eq!(seed, replication_seed(3, j as u64));
        }
    }

    #[test]
    fn too_few_replications() {
        let mut c = config(1);
        c.reps = 1;
        assert_eq!(run_covariance(&c), Err(Error::InsufficientData { have: 1, need: 2 }));
    }

    #[test]
    fn empirical_matrix_symmetric() {
        let out = run_covariance(&config(2)).unwrap();
        for (_, est) in out {
            assert_eq!(est.covariance.max_asymmetry(), 0.0);
        }
    }
}
