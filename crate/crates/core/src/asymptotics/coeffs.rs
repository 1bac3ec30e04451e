//! Mixing coefficients `b_j^(k)` and a precomputed table shared by the
//! covariance formulas.

use num_traits::Float;

use super::pmf::{pk_at_minimum, pk_step, tail_step, weighted_mass};
use crate::params::ModelParams;
use crate::scalar::{ln_factorial, ln_gamma, Scalar, SignedLogValue};

/// `b_j^(k) = Π_{t=j}^{k-1} (t + δ) / (t - k)`, with `b_k^(k) = 1` and
/// `b_j^(k) = 0` for `j > k`.
pub fn coeff_b<T: Scalar>(params: &ModelParams<T>, j: usize, k: usize) -> T {
    if j > k {
        return T::zero();
    }
    (j..k).fold(T::one(), |acc, t| acc * params.weight(t) / (T::usize(t) - T::usize(k)))
}

/// `b_j^(k)` in signed-log form:
/// `(-1)^(k-j) Γ(k + δ) / ((k - j)! Γ(j + δ))`.
///
/// Falls back to the product when some `t + δ` in `j..k` is not positive,
/// since the Gamma form then needs the sign of `Γ` at negative arguments.
pub fn coeff_b_log<F: Float + Scalar>(params: &ModelParams<F>, j: usize, k: usize) -> SignedLogValue<F> {
    if j > k {
        return SignedLogValue::zero();
    }
    if j == k {
        return SignedLogValue::one();
    }
    let c = |v: usize| F::from(v).expect("index representable");
    let delta = *params.delta();
    let sign = if (k - j).is_multiple_of(2) { 1 } else { -1 };
    if c(j) + delta > F::zero() {
        let ln = ln_gamma(c(k) + delta) - ln_gamma(c(j) + delta) - ln_factorial::<F>((k - j) as u64);
        return SignedLogValue::from_parts(sign, ln);
    }
    (j..k).fold(SignedLogValue::one(), |acc, t| {
        acc * SignedLogValue::from_value(c(t) + delta) / SignedLogValue::from_value(c(t) - c(k))
    })
}

/// `p_k`, the weighted tails and the rows `b_·^(r)` for every degree up to
/// `kmax`, computed once by recurrences.
#[derive(Debug, Clone)]
pub struct CoefficientTable<T> {
    params: ModelParams<T>,
    kmax: usize,
    // p_k for k in m..=kmax + 1
    pk: Vec<T>,
    // tail(h) for h in m-1..=kmax + 1
    tail: Vec<T>,
    // b[r - m][j - m] for m <= j <= r <= kmax
    b: Vec<Vec<T>>,
}

impl<T: Scalar> CoefficientTable<T> {
    /// Panics if `kmax < m`.
    pub fn new(params: &ModelParams<T>, kmax: usize) -> Self {
        let m = params.m();
        assert!(kmax >= m, "kmax = {kmax} below m = {m}");
        let mut pk = vec![pk_at_minimum(params)];
        for k in m..=kmax {
            let next = pk[k - m].clone() * pk_step(params, k);
            pk.push(next);
        }
        let mut tail = vec![weighted_mass(params)];
        for h in m..=kmax + 1 {
            let next = tail[h - m].clone() * tail_step(params, h);
            tail.push(next);
        }
        let b = (m..=kmax)
            .map(|r| {
                let mut row = vec![T::zero(); r - m + 1];
                row[r - m] = T::one();
                // b_j = b_{j+1} (j + δ) / (j - r)
                for j in (m..r).rev() {
                    row[j - m] = row[j + 1 - m].clone() * params.weight(j) / (T::usize(j) - T::usize(r));
                }
                row
            })
            .collect();
        Self { params: params.clone(), kmax, pk, tail, b }
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.params.m()
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// `p_k` for `m <= k <= kmax + 1`.
    pub fn p(&self, k: usize) -> &T {
        &self.pk[k - self.m()]
    }

    /// `Σ_{q > h} (q + δ) p_q` for `m - 1 <= h <= kmax + 1`.
    pub fn tail(&self, h: usize) -> &T {
        &self.tail[h + 1 - self.m()]
    }

    /// `b_j^(r)` for `j >= m`, `r <= kmax`; zero when `j > r`.
    pub fn b(&self, j: usize, r: usize) -> T {
        if j > r {
            T::zero()
        } else {
            self.b[r - self.m()][j - self.m()].clone()
        }
    }

    /// `b_m^(r), …, b_r^(r)`.
    pub fn b_row(&self, r: usize) -> &[T] {
        &self.b[r - self.m()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn exact(m: usize, num: i64, den: i64) -> ModelParams<BigRational> {
        ModelParams::new(m, BigRational::new(num.into(), den.into())).unwrap()
    }

    #[test]
    fn tree_case_values() {
        let p = exact(1, 0, 1);
        let v = |j, k| coeff_b(&p, j, k).to_f64_lossy();
        assert_eq!(v(1, 2), -1.0);
        assert_eq!(v(1, 3), 1.0);
        assert_eq!(v(2, 3), -2.0);
        assert_eq!(v(4, 4), 1.0);
        assert_eq!(v(5, 4), 0.0);
    }

    #[test]
    fn gamma_form_matches_product() {
        for (m, delta) in [(1usize, -0.9), (2, 0.0), (3, 5.0), (3, -2.7), (2, -1.0)] {
            let p = ModelParams::new(m, delta).unwrap();
            for k in m..40 {
                for j in 1..=k + 1 {
                    let direct = coeff_b(&p, j, k);
                    let log = coeff_b_log(&p, j, k).value();
                    assert!(
                        (direct - log).abs() <= 1e-11 * direct.abs().max(1e-300),
                        "m={m} δ={delta} j={j} k={k}: {direct} vs {log}"
                    );
                }
            }
        }
    }

    #[test]
    fn log_form_survives_overflow() {
        let p = ModelParams::new(1, 600.0).unwrap();
        let b = coeff_b_log(&p, 1, 600);
        let ln_direct: f64 = (1..600).map(|t| ((t as f64 + 600.0) / (600 - t) as f64).ln()).sum();
        assert_eq!(b.sign(), -1);
        assert!(ln_direct > 709.0);
        assert!((b.ln_abs() - ln_direct).abs() < 1e-10 * ln_direct);
    }

    #[test]
    fn ratio_identity() {
        let p = exact(2, -7, 5);
        let table = CoefficientTable::new(&p, 25);
        for r in 2..=25usize {
            for d in 2..r {
                let lhs = table.b(d + 1, r) * p.weight(d);
                let rhs = table.b(d, r) * (BigRational::from_integer(d.into()) - BigRational::from_integer(r.into()));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn table_agrees_with_free_functions() {
        let p = exact(3, 5, 2);
        let table = CoefficientTable::new(&p, 15);
        for r in 3..=15 {
            assert_eq!(table.b_row(r).len(), r - 2);
            for j in 3..=16 {
                assert_eq!(table.b(j, r), coeff_b(&p, j, r));
            }
            assert_eq!(table.p(r), &super::super::pmf::pk(&p, r).unwrap());
            assert_eq!(table.tail(r), &super::super::pmf::weighted_tail(&p, r));
        }
        assert_eq!(table.tail(2), &weighted_mass(&p));
    }
}
