//! The limiting covariance `R_Z` of the degree-count fluctuations, by its
//! closed form.
//!
//! Every `Γ(x) n! / Γ(X)` appearing in the closed form has `x + n + 1 = X`
//! with `X = r + l + 1 + c`, so it is the finite product
//! `n! / Π_{t=0}^{n} (x + t)` and the whole expression is rational in `δ`.
//! Here `c = 2δ + (2m + δ)/μ` with `μ` the [`Clock`] rate, which is
//! `2m + 3δ` for [`Clock::Draw`].

use rayon::prelude::*;

use super::coeffs::CoefficientTable;
use super::kernel::Clock;
use super::transform::sigma_via_transform_with;
use crate::matrix::CovarianceMatrix;
use crate::params::ModelParams;
use crate::scalar::{alternating, diagonal_sums, Scalar, SplitSum};

impl<T: Scalar> CoefficientTable<T> {
    /// `(-1)^t g(k, t) f(t)` for `t` in `m..=k`, where
    /// `g(k, t) = (-1)^(k-m) b_m^(k) C(k - m, t - m)` equals
    /// `Γ(k + δ) / (Γ(m + δ) (t - m)! (k - t)!)` and `f` is one of the two
    /// profiles `(m(t + 2 + δ) - t) / D(t)` and `m(t + δ) / D(t)`, with
    /// `D(t) = m(t + 2 + δ) + δ`.
    fn profile(&self, k: usize, first: bool) -> Vec<T> {
        let p = self.params();
        let m = self.m();
        let mm = p.m_scalar();
        let delta = p.delta().clone();
        let lead = alternating::<T>((k - m) as i64) * self.b(m, k);
        let mut binom = T::one();
        let mut out = Vec::with_capacity(k - m + 1);
        for t in m..=k {
            if t > m {
                binom = binom * T::usize(k - t + 1) / T::usize(t - m);
            }
            let den = mm.clone() * (T::usize(t + 2) + delta.clone()) + delta.clone();
            let num = if first {
                mm.clone() * (T::usize(t + 2) + delta.clone()) - T::usize(t)
            } else {
                mm.clone() * p.weight(t)
            };
            out.push(alternating::<T>(t as i64) * lead.clone() * binom.clone() * num / den);
        }
        out
    }

    /// `Σ_{t1, t2} x[t1] y[t2] / (t1 + t2 + 2m + shift)` over positions in
    /// `x` and `y`, summed along the diagonals of constant `t1 + t2`.
    fn convolve(&self, x: &Vec<T>, y: &Vec<T>, shift: &T) -> T {
        let m = self.m();
        let mut total = SplitSum::new();
        for (u, diag) in diagonal_sums(x, y).into_iter().enumerate() {
            total.add(diag / (T::usize(u + 2 * m) + shift.clone()));
        }
        total.total()
    }

    /// `R_Z(r, l)` from the closed form, `m <= r, l <= kmax`.
    pub fn rz_direct(&self, r: usize, l: usize) -> T {
        self.rz_direct_with(Clock::Draw, r, l)
    }

    /// `R_Z(r, l)` from the closed form under the given clock.
    pub fn rz_direct_with(&self, clock: Clock, r: usize, l: usize) -> T {
        let first = [self.profile(l, true), self.profile(r, true)];
        let second = [self.profile(l, false), self.profile(r, false)];
        self.rz_entry(clock, r, l, [&first[0], &first[1]], [&second[0], &second[1]])
    }

    /// One entry with the profiles of `l` and `r` supplied.
    #[allow(clippy::ptr_arg)]
    fn rz_entry(&self, clock: Clock, r: usize, l: usize, first_profiles: [&Vec<T>; 2], second_profiles: [&Vec<T>; 2]) -> T {
        let p = self.params();
        let m = self.m();
        let delta = p.delta().clone();
        let growth = p.growth_rate();
        let rate = clock.rate(p);
        let shift = T::int(2) * delta.clone() + growth.clone() / rate.clone();
        let mm = p.m_scalar();
        let b = |j: usize, k: usize| self.b(j, k);

        // every Γ-ratio is Γ(a + c) (N - a)! / Γ(N + 1 + c) with N = r + l,
        // i.e. (N - a)! / Π_{j=a}^{N} (j + c)
        let top = r + l;
        let mut suffix = vec![T::one(); top + 2];
        for j in (2 * m..=top).rev() {
            suffix[j] = suffix[j + 1].clone() * (T::usize(j) + shift.clone());
        }
        let mut factorial = vec![T::one(); top - 2 * m + 1];
        for n in 1..factorial.len() {
            factorial[n] = factorial[n - 1].clone() * T::usize(n);
        }
        let term = |sum: &mut SplitSum<T>, coef: T, a: usize| {
            if coef.is_zero() {
                return;
            }
            assert!(a <= top, "nonzero coefficient with negative factorial argument");
            sum.add(coef * factorial[top - a].clone() / suffix[a].clone());
        };

        let mut first = SplitSum::new();
        term(&mut first, b(m, l) * b(m, r) * growth.clone(), 2 * m);
        for q in m..=r.max(l) {
            let w = p.weight(q) * self.p(q).clone();
            let sign = alternating::<T>((m + q + 1) as i64);
            term(&mut first, w.clone() * sign.clone() * (b(m, l) * b(q, r) + b(m, r) * b(q, l)), q + m);
            term(&mut first, w.clone() * sign * (b(m, l) * b(q + 1, r) + b(m, r) * b(q + 1, l)), q + m + 1);
            term(&mut first, w.clone() * mm.clone() * b(q, l) * b(q, r), 2 * q);
            term(&mut first, w.clone() * mm.clone() * (b(q, l) * b(q + 1, r) + b(q, r) * b(q + 1, l)), 2 * q + 1);
            term(&mut first, w * mm.clone() * b(q + 1, l) * b(q + 1, r), 2 * q + 2);
        }
        let first = alternating::<T>((r + l) as i64) * first.total();

        let second = self.convolve(first_profiles[0], first_profiles[1], &shift);
        let third = self.convolve(second_profiles[0], second_profiles[1], &shift);
        let second = growth.clone() * second;
        let third = growth * T::usize(m - 1) / (mm.clone() * mm) * third;
        (first - second - third) / rate
    }
}

/// `R_Z(r, l)` from the closed form.
pub fn rz_direct<T: Scalar>(params: &ModelParams<T>, r: usize, l: usize) -> T {
    CoefficientTable::new(params, r.max(l).max(params.m())).rz_direct(r, l)
}

/// `R_Z` over degrees `m..=kmax` from the closed form.
pub fn rz_matrix<T: Scalar>(params: &ModelParams<T>, kmax: usize) -> CovarianceMatrix<T> {
    rz_matrix_with(params, kmax, Clock::Draw)
}

/// [`rz_matrix`] under the given clock.
pub fn rz_matrix_with<T: Scalar>(params: &ModelParams<T>, kmax: usize, clock: Clock) -> CovarianceMatrix<T> {
    let m = params.m();
    let table = CoefficientTable::new(params, kmax);
    let first: Vec<Vec<T>> = (m..=kmax).map(|k| table.profile(k, true)).collect();
    let second: Vec<Vec<T>> = (m..=kmax).map(|k| table.profile(k, false)).collect();
    let rows: Vec<Vec<T>> = (m..=kmax)
        .into_par_iter()
        .map(|r| {
            (m..=r)
                .map(|l| {
                    let f = [&first[l - m], &first[r - m]];
                    let g = [&second[l - m], &second[r - m]];
                    table.rz_entry(clock, r, l, f, g)
                })
                .collect()
        })
        .collect();
    CovarianceMatrix::from_fn(m, kmax, |r, l| {
        if l > r {
            // filled from the mirrored entry below
            T::zero()
        } else {
            rows[r - m][l - m].clone()
        }
    })
    .symmetrized_from_lower()
}

/// `R_Z` for float parameters, evaluated in exact rational arithmetic from
/// the decimal value of `delta` and rounded once at the end.
pub fn rz_matrix_exact(params: &ModelParams<f64>, kmax: usize, clock: Clock) -> CovarianceMatrix<f64> {
    rz_matrix_with(&params.to_exact(), kmax, clock).to_f64()
}

/// `D R_Y Dᵀ` for float parameters, evaluated exactly and rounded once.
pub fn sigma_via_transform_exact(params: &ModelParams<f64>, kmax: usize, clock: Clock) -> CovarianceMatrix<f64> {
    sigma_via_transform_with(&params.to_exact(), kmax, clock).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::relative_difference;
    use num_rational::BigRational;

    #[test]
    fn both_paths_agree_exactly() {
        for (m, num, den) in [(1usize, 0i64, 1i64), (1, 1, 1), (2, -9, 5), (3, 5, 1)] {
            let p = ModelParams::new(m, BigRational::new(num.into(), den.into())).unwrap();
            let direct = rz_matrix(&p, 10);
            let via = super::super::transform::sigma_via_transform(&p, 10);
            for r in m..=10 {
                for l in m..=10 {
                    assert_eq!(direct.get(r, l), via.get(r, l), "m={m} δ={num}/{den} ({r},{l})");
                }
            }
        }
    }

    #[test]
    fn vertex_clock_paths_agree_exactly() {
        for (m, num, den) in [(2usize, 0i64, 1i64), (2, -9, 5), (3, 5, 1), (3, -27, 10)] {
            let p = ModelParams::new(m, BigRational::new(num.into(), den.into())).unwrap();
            let direct = rz_matrix_with(&p, 10, Clock::Vertex);
            let via = sigma_via_transform_with(&p, 10, Clock::Vertex);
            assert_eq!(direct, via, "m={m} δ={num}/{den}");
        }
    }

    #[test]
    fn vertex_clock_reference_values() {
        // m = 2, δ = 0 and m = 3, δ = 5, evaluated independently in high precision
        let p = ModelParams::new(2, 0.0).unwrap();
        let rz = rz_matrix_exact(&p, 10, Clock::Vertex);
        assert!((rz.get(2, 2) - 0.125).abs() < 1e-15);
        assert!((rz.get(3, 2) + 0.0928571428571).abs() < 1e-12);
        assert!((rz.get(10, 5) + 0.00119468766528).abs() < 1e-13);
        let p = ModelParams::new(3, 5.0).unwrap();
        let rz = rz_matrix_exact(&p, 12, Clock::Vertex);
        assert!((rz.get(12, 12) - 0.0135577825732).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let p = ModelParams::new(2, 0.7).unwrap().to_exact();
        let table = CoefficientTable::new(&p, 12);
        for (r, l) in [(2, 3), (5, 11), (12, 4), (7, 7)] {
            assert_eq!(table.rz_direct(r, l), table.rz_direct(l, r));
        }
    }

    #[test]
    fn float_path_close_for_small_degrees() {
        // plain f64 loses digits to cancellation as r grows; small r is fine
        let p = ModelParams::new(2, 1.0).unwrap();
        let exact = rz_matrix_exact(&p, 8, Clock::Draw);
        let float = rz_matrix(&p, 8);
        for r in 2..=8 {
            for l in 2..=8 {
                let rel = relative_difference(exact.get(r, l), float.get(r, l));
                assert!(rel < 1e-6, "({r},{l}) rel = {rel}");
            }
        }
    }

    #[test]
    fn tree_variance_decreasing() {
        let p = ModelParams::new(1, 1.0).unwrap();
        let rz = rz_matrix_exact(&p, 20, Clock::Draw);
        for r in 2..20 {
            assert!(rz.get(r + 1, r + 1) < rz.get(r, r), "r = {r}");
        }
    }
}
