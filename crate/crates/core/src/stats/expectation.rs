use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Exact `E[N_k(s, i)]` for degrees `m..=kmax`, advanced one draw at a time
/// from the seed graph.
///
/// Positions follow [`GraphState`](crate::model::GraphState): a pending draw
/// `(s, i)` with `i < m`, the seed graph being `(2, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationTable<T> {
    params: ModelParams<T>,
    s: usize,
    i: usize,
    kmax: usize,
    values: Vec<T>,
}

impl<T: Scalar> ExpectationTable<T> {
    /// Expectations in the seed graph: two vertices of degree `m`.
    pub fn initial(params: &ModelParams<T>, kmax: usize) -> Result<Self> {
        let m = params.m();
        if kmax < m {
            return Err(Error::InvalidInput(format!("kmax = {kmax} below m = {m}")));
        }
        let mut values = vec![T::zero(); kmax - m + 1];
        values[0] = T::int(2);
        Ok(Self { params: params.clone(), s: 2, i: 0, kmax, values })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// `E[N_k]` for `m <= k <= kmax`.
    pub fn value(&self, k: usize) -> &T {
        &self.values[k - self.params.m()]
    }

    /// `E[N_m], …, E[N_kmax]`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Applies the expected effect of the next draw. Degree `j` is fed only
    /// by degrees `j` and `j - 1`, so truncating at `kmax` loses nothing.
    pub fn advance(&mut self) {
        let m = self.params.m();
        let norm = T::usize(self.s) * self.params.growth_rate() - T::usize(2 * m) + T::usize(self.i);
        let completes = self.i + 1 == m;
        let mut below = T::zero();
        for (idx, v) in self.values.iter_mut().enumerate() {
            let k = idx + m;
            let old = v.clone();
            let mut next = old.clone() - self.params.weight(k) * old.clone() / norm.clone() + below;
            if k == m && completes {
                next = next + T::one();
            }
            below = self.params.weight(k) * old / norm.clone();
            *v = next;
        }
        self.i += 1;
        if completes {
            self.s += 1;
            self.i = 0;
        }
    }

    /// Advances to the pending draw `(s, i)`; `(s, m)` is read as `(s + 1, 0)`.
    pub fn advance_to(&mut self, s: usize, i: usize) -> Result<()> {
        let (s, i) = normalize(self.params.m(), s, i)?;
        if (s, i) < (self.s, self.i) {
            return Err(Error::InvalidInput(format!(
                "cannot go back from ({}, {}) to ({s}, {i})",
                self.s, self.i
            )));
        }
        while (self.s, self.i) != (s, i) {
            self.advance();
        }
        Ok(())
    }

    /// `Σ_k E[N_k]` and `Σ_k k E[N_k]` over the tabulated degrees.
    pub fn moments(&self) -> (T, T) {
        let m = self.params.m();
        self.values.iter().enumerate().fold((T::zero(), T::zero()), |(n, d), (idx, v)| {
            (n + v.clone(), d + T::usize(idx + m) * v.clone())
        })
    }
}

/// Maps `(s, m)` to `(s + 1, 0)` and checks that `(s, i)` is a reachable
/// pending draw.
pub(crate) fn normalize(m: usize, s: usize, i: usize) -> Result<(usize, usize)> {
    let (s, i) = if i == m { (s + 1, 0) } else { (s, i) };
    if i > m || s < 2 {
        return Err(Error::InvalidInput(format!("({s}, {i}) is not a draw position for m = {m}")));
    }
    Ok((s, i))
}

/// `E[N_k(s, i)]` for `m <= k <= kmax`.
pub fn exact_expected_counts<T: Scalar>(
    params: &ModelParams<T>,
    s: usize,
    i: usize,
    kmax: usize,
) -> Result<ExpectationTable<T>> {
    let mut table = ExpectationTable::initial(params, kmax)?;
    table.advance_to(s, i)?;
    Ok(table)
}
