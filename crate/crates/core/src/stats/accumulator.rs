use crate::error::{Error, Result};
use crate::matrix::CovarianceMatrix;

/// Streaming mean and co-moment matrix of vectors over degrees `m..=kmax`.
///
/// `merge` combines two accumulators as if their inputs had been fed to a
/// single one, so replications can be reduced in any grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceAccumulator {
    m: usize,
    kmax: usize,
    n: u64,
    mean: Vec<f64>,
    // row-major Σ (x - mean)(x - mean)ᵀ
    comoment: Vec<f64>,
}

/// Finalized sample covariance with per-entry normal-theory standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub n: u64,
    pub mean: Vec<f64>,
    pub covariance: CovarianceMatrix<f64>,
    pub stderr: CovarianceMatrix<f64>,
}

impl CovarianceAccumulator {
    pub fn new(m: usize, kmax: usize) -> Self {
        assert!(kmax >= m, "kmax = {kmax} below m = {m}");
        let d = kmax - m + 1;
        Self { m, kmax, n: 0, mean: vec![0.0; d], comoment: vec![0.0; d * d] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn accumulate(&mut self, x: &[f64]) -> Result<()> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::ShapeMismatch(format!("vector of length {} for dimension {d}", x.len())));
        }
        self.n += 1;
        let n = self.n as f64;
        let before: Vec<f64> = x.iter().zip(&self.mean).map(|(xi, mi)| xi - mi).collect();
        for (mi, di) in self.mean.iter_mut().zip(&before) {
            *mi += di / n;
        }
        for r in 0..d {
            let after_r = x[r] - self.mean[r];
            for l in 0..d {
                self.comoment[r * d + l] += after_r * before[l];
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if (self.m, self.kmax) != (other.m, other.kmax) {
            return Err(Error::ShapeMismatch(format!(
                "degrees {}..={} and {}..={}",
                self.m, self.kmax, other.m, other.kmax
            )));
        }
        if other.n == 0 {
            return Ok(());
        }
        if self.n == 0 {
            *self = other.clone();
            return Ok(());
        }
        let d = self.dim();
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for r in 0..d {
            for l in 0..d {
                self.comoment[r * d + l] += other.comoment[r * d + l] + delta[r] * delta[l] * na * nb / n;
            }
        }
        for (a, db) in self.mean.iter_mut().zip(&delta) {
            *a += db * nb / n;
        }
        self.n += other.n;
        Ok(())
    }

    /// Unbiased covariance. The standard error of entry `(r, l)` is
    /// `√((c_rr c_ll + c_rl²) / (n - 1))`, exact for Gaussian data.
    pub fn finalize(&self) -> Result<CovarianceEstimate> {
        if self.n < 2 {
            return Err(Error::InsufficientData { have: self.n as usize, need: 2 });
        }
        let d = self.dim();
        let denom = (self.n - 1) as f64;
        let cov: Vec<f64> = (0..d * d)
            .map(|idx| {
                let (r, l) = (idx / d, idx % d);
                // average the two triangles so the result is exactly symmetric
                0.5 * (self.comoment[r * d + l] + self.comoment[l * d + r]) / denom
            })
            .collect();
        let se: Vec<f64> = (0..d * d)
            .map(|idx| {
                let (r, l) = (idx / d, idx % d);
                ((cov[r * d + r] * cov[l * d + l] + cov[idx] * cov[idx]) / denom).sqrt()
            })
            .collect();
        Ok(CovarianceEstimate {
            n: self.n,
            mean: self.mean.clone(),
            covariance: CovarianceMatrix::from_rows(self.m, self.kmax, cov)?,
            stderr: CovarianceMatrix::from_rows(self.m, self.kmax, se)?,
        })
    }
}
