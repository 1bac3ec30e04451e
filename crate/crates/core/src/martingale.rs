//! The martingale `M_{s,i}^(k) = a_{s,i}^(k) Σ_{j=m}^{k} b_j^(k) (N_j - E N_j)`
//! and exact checks of its defining properties.
//!
//! `a_{s,i}^(k)` is the inverse of the product of
//! `1 - (k + δ) / (t(2m + δ) - 2m + r)` over every draw `(t, r)` from an
//! anchor position up to `(s, i)`. The anchor is arrival `max(k - m + 1, 2)`
//! (arrival 1 has no draws), moved past the last draw whose factor vanishes,
//! if any. Before the anchor the recurrence is run backwards, which is
//! possible down to the first vanishing factor; earlier positions are
//! reported as degenerate. Factors may be negative for small `t`.

use num_traits::Float;

use crate::asymptotics::coeff_b;
use crate::error::{Error, Result};
use crate::model::GraphState;
use crate::params::ModelParams;
use crate::scalar::{relative_difference, Scalar, SignedLogValue};
use crate::stats::{normalize, ExpectationTable};

/// First arrival whose draws may enter the product defining `a^(k)`.
pub fn first_arrival(m: usize, k: usize) -> usize {
    (k + 1).saturating_sub(m).max(2)
}

fn draw_norm<T: Scalar>(params: &ModelParams<T>, t: usize, r: usize) -> T {
    T::usize(t) * params.growth_rate() - T::usize(2 * params.m()) + T::usize(r)
}

fn next_draw(m: usize, (t, r): (usize, usize)) -> (usize, usize) {
    if r + 1 == m {
        (t + 1, 0)
    } else {
        (t, r + 1)
    }
}

/// Position `(s, i)` where `a^(k) = 1`.
///
/// Only draws with `t(2m + δ) - 2m + r <= k + δ` can vanish, and these
/// normalizers increase, so the scan is finite.
pub fn coefficient_start<T: Scalar>(params: &ModelParams<T>, k: usize) -> (usize, usize) {
    let m = params.m();
    let mut start = (first_arrival(m, k), 0);
    let mut pos = (2, 0);
    let weight = params.weight(k);
    loop {
        let norm = draw_norm(params, pos.0, pos.1);
        if norm > weight {
            return start;
        }
        pos = next_draw(m, pos);
        if norm == weight && pos > start {
            start = pos;
        }
    }
}

/// `1 - (k + δ) / (t(2m + δ) - 2m + r)`, the factor removed at draw `(t, r)`.
fn draw_factor<T: Scalar>(params: &ModelParams<T>, k: usize, t: usize, r: usize) -> Result<T> {
    let norm = draw_norm(params, t, r);
    if !norm.is_positive() {
        return Err(Error::DegenerateCoefficient { k, t, r });
    }
    let f = T::one() - params.weight(k) / norm;
    if f.is_zero() {
        return Err(Error::DegenerateCoefficient { k, t, r });
    }
    Ok(f)
}

/// Walks `a_{s,i}^(k)` forward one draw at a time, in log space.
#[derive(Debug, Clone)]
pub struct MartingaleCoefficients<F> {
    params: ModelParams<F>,
    k: usize,
    s: usize,
    i: usize,
    value: SignedLogValue<F>,
}

impl<F: Float + Scalar> MartingaleCoefficients<F> {
    /// Starts at `a = 1` on [`coefficient_start`].
    pub fn new(params: &ModelParams<F>, k: usize) -> Result<Self> {
        if k < params.m() {
            return Err(Error::DegreeBelowMinimum { k, m: params.m() });
        }
        let (s, i) = coefficient_start(params, k);
        Ok(Self { params: params.clone(), k, s, i, value: SignedLogValue::one() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Current draw position, normalized so `i < m`.
    pub fn position(&self) -> (usize, usize) {
        (self.s, self.i)
    }

    pub fn value(&self) -> SignedLogValue<F> {
        self.value
    }

    /// Moves past the pending draw.
    pub fn advance(&mut self) -> Result<()> {
        let f = draw_factor(&self.params, self.k, self.s, self.i)?;
        self.value = self.value / SignedLogValue::from_value(f);
        (self.s, self.i) = next_draw(self.params.m(), (self.s, self.i));
        Ok(())
    }

    /// Advances to `(s, i)`, with `i = m` read as `(s + 1, 0)`.
    pub fn advance_to(&mut self, s: usize, i: usize) -> Result<()> {
        let target = normalize(self.params.m(), s, i)?;
        if target < (self.s, self.i) {
            return Err(Error::InvalidInput(format!(
                "({s}, {i}) precedes the current position ({}, {})",
                self.s, self.i
            )));
        }
        while (self.s, self.i) < target {
            self.advance()?;
        }
        Ok(())
    }
}

fn check_range(m: usize, s: usize, i: usize, k: usize) -> Result<(usize, usize)> {
    if k < m {
        return Err(Error::DegreeBelowMinimum { k, m });
    }
    normalize(m, s, i)
}

/// `a_{s,i}^(k)` for `0 <= i <= m` by direct product, in the scalar type.
pub fn coeff_a<T: Scalar>(params: &ModelParams<T>, s: usize, i: usize, k: usize) -> Result<T> {
    let m = params.m();
    let pos = check_range(m, s, i, k)?;
    let start = coefficient_start(params, k);
    let (from, to) = if pos < start { (pos, start) } else { (start, pos) };
    let mut product = T::one();
    let mut at = from;
    while at < to {
        product = product * draw_factor(params, k, at.0, at.1)?;
        at = next_draw(m, at);
    }
    Ok(if pos < start { product } else { T::one() / product })
}

/// `a_{s,i}^(k)` in signed-log form.
pub fn coeff_a_log<F: Float + Scalar>(
    params: &ModelParams<F>,
    s: usize,
    i: usize,
    k: usize,
) -> Result<SignedLogValue<F>> {
    let (s, i) = check_range(params.m(), s, i, k)?;
    if (s, i) < coefficient_start(params, k) {
        return coeff_a(params, s, i, k).map(SignedLogValue::from_value);
    }
    let mut walk = MartingaleCoefficients::new(params, k)?;
    walk.advance_to(s, i)?;
    Ok(walk.value())
}

/// `M_{s,i}^(k)` at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleValue<T> {
    pub s: usize,
    pub i: usize,
    pub k: usize,
    pub value: T,
}

/// `Σ_{j=m}^{k} b_j^(k) (N_j - E N_j)` from counts indexed by degree.
fn mixed_deviation<T: Scalar>(params: &ModelParams<T>, counts: &[T], expected: &ExpectationTable<T>, k: usize) -> T {
    let m = params.m();
    (m..=k).fold(T::zero(), |acc, j| {
        let n = counts.get(j).cloned().unwrap_or_else(T::zero);
        acc + coeff_b(params, j, k) * (n - expected.value(j).clone())
    })
}

fn counts_as<T: Scalar>(state: &GraphState, upto: usize) -> Vec<T> {
    (0..=upto).map(|j| T::from_u64(state.count(j)).expect("count representable")).collect()
}

/// `M_{s,i}^(k)` of `state`, with expectations from `expected` at the same
/// position.
pub fn martingale_value<T: Scalar>(
    state: &GraphState,
    expected: &ExpectationTable<T>,
    params: &ModelParams<T>,
    k: usize,
) -> Result<MartingaleValue<T>> {
    if (state.s(), state.i()) != (expected.s(), expected.i()) {
        return Err(Error::ShapeMismatch(format!(
            "state at ({}, {}), expectations at ({}, {})",
            state.s(),
            state.i(),
            expected.s(),
            expected.i()
        )));
    }
    if k > expected.kmax() {
        return Err(Error::ShapeMismatch(format!("degree {k} beyond tabulated {}", expected.kmax())));
    }
    let a = coeff_a(params, state.s(), state.i(), k)?;
    let value = a * mixed_deviation(params, &counts_as(state, k), expected, k);
    Ok(MartingaleValue { s: state.s(), i: state.i(), k, value })
}

/// Largest relative residual of the compatibility system linking
/// `a_{s,i}`, `a_{s,i+1}` and the `b_j^(k)`, for `0 <= i < m`.
pub fn check_condizioni<T: Scalar>(params: &ModelParams<T>, s: usize, i: usize, k: usize) -> Result<T> {
    let m = params.m();
    if i >= m {
        return Err(Error::InvalidInput(format!("sub-step {i} has no following draw")));
    }
    let a_now = coeff_a(params, s, i, k)?;
    let a_next = coeff_a(params, s, i + 1, k)?;
    let norm = T::usize(s) * params.growth_rate() - T::usize(2 * m) + T::usize(i);
    let mut worst = T::zero();
    for j in m..k {
        let x = params.weight(j) / norm.clone();
        let lhs = a_next.clone()
            * (coeff_b(params, j, k) * (T::one() - x.clone()) + coeff_b(params, j + 1, k) * x);
        let rhs = a_now.clone() * coeff_b(params, j, k);
        let d = relative_difference(&lhs, &rhs);
        if d > worst {
            worst = d;
        }
    }
    let lhs = a_next * (T::one() - params.weight(k) / norm);
    let d = relative_difference(&lhs, &a_now);
    Ok(if d > worst { d } else { worst })
}

/// Exact `E[M_{s,i+1}^(k) | F_{s,i}]` against `M_{s,i}^(k)` for arbitrary
/// counts `counts[j]` at the pending draw `(s, i)`.
///
/// The next edge lands on a vertex of degree `d` with probability
/// `(d + δ) N_d / normalizer`. Degrees above `k` are not seen by `M^(k)`, so
/// those targets form one class. Returns `|E M' - M|` relative to
/// `|a| Σ_j |b_j| (N_j + E N_j)`, the size of the terms that cancel.
pub fn one_step_residual_counts<T: Scalar>(
    params: &ModelParams<T>,
    counts: &[T],
    expected: &ExpectationTable<T>,
    k: usize,
) -> Result<T> {
    let m = params.m();
    let (s, i) = (expected.s(), expected.i());
    if k > expected.kmax() {
        return Err(Error::ShapeMismatch(format!("degree {k} beyond tabulated {}", expected.kmax())));
    }
    let a_now = coeff_a(params, s, i, k)?;
    let a_next = coeff_a(params, s, i + 1, k)?;
    let mut next_expected = expected.clone();
    next_expected.advance();
    let completes = i + 1 == m;

    let mut n: Vec<T> = (0..=k + 1).map(|j| counts.get(j).cloned().unwrap_or_else(T::zero)).collect();
    let norm = T::usize(s) * params.growth_rate() - T::usize(2 * m) + T::usize(i);
    if completes {
        n[m] = n[m].clone() + T::one();
    }
    let mut mean_next = T::zero();
    let mut seen = T::zero();
    for d in m..=k {
        let nd = counts.get(d).cloned().unwrap_or_else(T::zero);
        if nd.is_zero() {
            continue;
        }
        let w = params.weight(d) * nd;
        seen = seen + w.clone();
        let mut moved = n.clone();
        moved[d] = moved[d].clone() - T::one();
        moved[d + 1] = moved[d + 1].clone() + T::one();
        mean_next = mean_next + w / norm.clone() * mixed_deviation(params, &moved, &next_expected, k);
    }
    let rest = (norm.clone() - seen) / norm;
    mean_next = a_next * (mean_next + rest * mixed_deviation(params, &n, &next_expected, k));

    let current = a_now.clone() * mixed_deviation(params, counts, expected, k);
    let scale = (m..=k).fold(T::zero(), |acc, j| {
        let nj = counts.get(j).cloned().unwrap_or_else(T::zero);
        acc + coeff_b(params, j, k).abs() * (nj.abs() + expected.value(j).abs())
    }) * a_now.abs();
    let diff = (mean_next - current).abs();
    Ok(if scale.is_zero() { diff } else { diff / scale })
}

/// [`one_step_residual_counts`] for a reachable state; expectations are
/// computed exactly up to the state's position.
pub fn one_step_expectation_check<T: Scalar>(state: &GraphState, params: &ModelParams<T>, k: usize) -> Result<T> {
    let expected = crate::stats::exact_expected_counts(params, state.s(), state.i(), k)?;
    one_step_residual_counts(params, &counts_as(state, k + 1), &expected, k)
}

/// Least-squares slope of `ln |a_{s,0}^(k)|` against `ln s` over `s_grid`.
///
/// Each of the `m` draws of an arrival multiplies `a` by about
/// `1 + (k + δ) / (s(2m + δ))`, so the slope tends to `m (k + δ) / (2m + δ)`.
pub fn regvar_exponent(params: &ModelParams<f64>, k: usize, s_grid: &[usize]) -> Result<f64> {
    if s_grid.len() < 3 || s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid needs at least 3 strictly increasing points".into()));
    }
    let start = coefficient_start(params, k);
    if (s_grid[0], 0) < start {
        return Err(Error::InvalidInput(format!("grid starts before arrival {}", start.0)));
    }
    let mut walk = MartingaleCoefficients::new(params, k)?;
    let mut points = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        walk.advance_to(s, 0)?;
        points.push(((s as f64).ln(), walk.value().ln_abs()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
