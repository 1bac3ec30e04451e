//! Pearson χ² tests used to compare samplers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Cells are merged left to right until each has at least this expected count.
const MIN_EXPECTED: f64 = 5.0;

/// Upper tail probability of χ² with `dof` degrees of freedom.
fn upper_tail(statistic: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InsufficientData { have: 1, need: 2 });
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(dist.sf(statistic))
}

/// Goodness of fit of `observed` counts to probabilities `probs`. Returns the
/// p-value.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<f64> {
    if observed.len() != probs.len() {
        return Err(Error::ShapeMismatch(format!("{} cells, {} probabilities", observed.len(), probs.len())));
    }
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut cells = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        obs += o as f64;
        exp += p * n;
        if exp >= MIN_EXPECTED {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    upper_tail(stat, cells.len().saturating_sub(1))
}

/// Homogeneity of two count vectors over the same cells. Returns the p-value.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} and {} cells", a.len(), b.len())));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    let mut cells = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        ca += x as f64;
        cb += y as f64;
        let pooled = ca + cb;
        if pooled * na.min(nb) / n >= MIN_EXPECTED {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => cells.push((ca, cb)),
        }
    }
    let stat: f64 = cells
        .iter()
        .map(|&(x, y)| {
            let pooled = x + y;
            let (ea, eb) = (pooled * na / n, pooled * nb / n);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    upper_tail(stat, cells.len().saturating_sub(1))
}
