//! Limiting degree distribution and its weighted tail sums.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scalar::{ln_gamma, Scalar};

/// `p_m = (2 + δ/m) / (m + 2 + δ + δ/m)`, written without nested fractions.
pub(crate) fn pk_at_minimum<T: Scalar>(params: &ModelParams<T>) -> T {
    let m = params.m_scalar();
    let delta = params.delta().clone();
    params.growth_rate() / (m.clone() * (m.clone() + T::int(2)) + (m + T::one()) * delta)
}

/// Ratio `p_{k+1} / p_k = (k + δ) / (k + 3 + δ + δ/m)`.
pub(crate) fn pk_step<T: Scalar>(params: &ModelParams<T>, k: usize) -> T {
    let m = params.m_scalar();
    let delta = params.delta().clone();
    m.clone() * params.weight(k) / (m.clone() * T::usize(k + 3) + (m + T::one()) * delta)
}

/// Limiting proportion `p_k` of vertices with degree `k`, by the telescoped
/// Gamma ratio. O(k - m).
pub fn pk<T: Scalar>(params: &ModelParams<T>, k: usize) -> Result<T> {
    let m = params.m();
    if k < m {
        return Err(Error::DegreeBelowMinimum { k, m });
    }
    Ok((m..k).fold(pk_at_minimum(params), |p, j| p * pk_step(params, j)))
}

/// `ln p_k` from log-Gamma values. O(1) in `k`.
pub fn ln_pk<F: Float + Scalar>(params: &ModelParams<F>, k: usize) -> Result<F> {
    let m = params.m();
    if k < m {
        return Err(Error::DegreeBelowMinimum { k, m });
    }
    let c = |v: usize| F::from(v).expect("index representable");
    let delta = *params.delta();
    let mf = c(m);
    let shift = delta + delta / mf;
    Ok((F::from(2.0).unwrap() + delta / mf).ln() + ln_gamma(c(k) + delta)
        + ln_gamma(mf + F::from(2.0).unwrap() + shift)
        - ln_gamma(mf + delta)
        - ln_gamma(c(k) + F::from(3.0).unwrap() + shift))
}

/// `p_m, p_{m+1}, …, p_kmax` by forward recurrence.
pub fn pk_table<T: Scalar>(params: &ModelParams<T>, kmax: usize) -> Vec<T> {
    let m = params.m();
    let mut out = Vec::with_capacity(kmax.saturating_sub(m) + 1);
    if kmax < m {
        return out;
    }
    let mut p = pk_at_minimum(params);
    for k in m..=kmax {
        if k > m {
            p = p * pk_step(params, k - 1);
        }
        out.push(p.clone());
    }
    out
}

/// `Σ_{q ≥ m} (q + δ) p_q = 2m + δ`: the mean limiting degree `2m` plus `δ`.
pub fn weighted_mass<T: Scalar>(params: &ModelParams<T>) -> T {
    params.growth_rate()
}

/// `Σ_{q > h} (q + δ) p_q` in closed form, for `h >= m - 1`.
///
/// `(q + δ) p_q` telescopes, which gives the ratio
/// `tail(h) / tail(h - 1) = (h + 1 + δ) / (h + 2 + δ + δ/m)` started from
/// `tail(m - 1) = 2m + δ`.
pub fn weighted_tail<T: Scalar>(params: &ModelParams<T>, h: usize) -> T {
    let m = params.m();
    assert!(h + 1 >= m, "tail defined from h = m - 1");
    (m..=h).fold(weighted_mass(params), |acc, j| acc * tail_step(params, j))
}

pub(crate) fn tail_step<T: Scalar>(params: &ModelParams<T>, h: usize) -> T {
    let m = params.m_scalar();
    let delta = params.delta().clone();
    m.clone() * params.weight(h + 1) / (m.clone() * T::usize(h + 2) + (m + T::one()) * delta)
}
