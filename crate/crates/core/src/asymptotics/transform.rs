//! The triangular change of basis between raw and mixed degree counts.

use super::coeffs::CoefficientTable;
use super::kernel::Clock;
use crate::matrix::CovarianceMatrix;
use crate::params::ModelParams;
use crate::scalar::{alternating, Scalar};

/// Lower-triangular `C` with `c_{r,l} = b_l^(r)` and its inverse `D` with
/// `d_{r,l} = (-1)^(r-l) b_l^(r)`, both indexed by degrees `m..=kmax`.
#[derive(Debug, Clone)]
pub struct TransformMatrices<T> {
    m: usize,
    kmax: usize,
    c: Vec<Vec<T>>,
    d: Vec<Vec<T>>,
}

impl<T: Scalar> TransformMatrices<T> {
    pub fn new(params: &ModelParams<T>, kmax: usize) -> Self {
        Self::from_table(&CoefficientTable::new(params, kmax))
    }

    pub fn from_table(table: &CoefficientTable<T>) -> Self {
        let (m, kmax) = (table.m(), table.kmax());
        let n = kmax - m + 1;
        let mut c = vec![vec![T::zero(); n]; n];
        let mut d = vec![vec![T::zero(); n]; n];
        for r in m..=kmax {
            for l in m..=r {
                let b = table.b(l, r);
                d[r - m][l - m] = alternating::<T>((r - l) as i64) * b.clone();
                c[r - m][l - m] = b;
            }
        }
        Self { m, kmax, c, d }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn c(&self, r: usize, l: usize) -> &T {
        &self.c[r - self.m][l - self.m]
    }

    pub fn d(&self, r: usize, l: usize) -> &T {
        &self.d[r - self.m][l - self.m]
    }

    /// Largest `|(C D - I)_{r,l}|` and `|(D C - I)_{r,l}|`.
    pub fn identity_residual(&self) -> T {
        let n = self.c.len();
        let mut worst = T::zero();
        for (x, y) in [(&self.c, &self.d), (&self.d, &self.c)] {
            for r in 0..n {
                for l in 0..=r {
                    let mut sum = (l..=r).fold(T::zero(), |acc, t| acc + x[r][t].clone() * y[t][l].clone());
                    if r == l {
                        sum = sum - T::one();
                    }
                    if sum.abs() > worst {
                        worst = sum.abs();
                    }
                }
            }
        }
        worst
    }

    /// `D A Dᵀ` for a symmetric `A` over the same degree range.
    pub fn congruence(&self, a: &CovarianceMatrix<T>) -> CovarianceMatrix<T> {
        assert_eq!((a.m(), a.kmax()), (self.m, self.kmax), "degree ranges differ");
        let (m, n) = (self.m, self.c.len());
        // (D A) first, then rows of D on the right, using triangularity
        let mut da = vec![vec![T::zero(); n]; n];
        for r in 0..n {
            for j in 0..n {
                da[r][j] = (0..=r).fold(T::zero(), |acc, t| acc + self.d[r][t].clone() * a.get(t + m, j + m).clone());
            }
        }
        CovarianceMatrix::from_fn(m, self.kmax, |r, l| {
            let (r, l) = (r - m, l - m);
            (0..=l).fold(T::zero(), |acc, t| acc + da[r][t].clone() * self.d[l][t].clone())
        })
    }
}

/// `Σ_{t=l}^{r} x^(t-l) b_t^(r) b_l^(t)`, which equals `b_l^(r) (1 + x)^(r-l)`.
pub fn binomial_identity_lhs<T: Scalar>(table: &CoefficientTable<T>, l: usize, r: usize, x: &T) -> T {
    let mut power = T::one();
    let mut sum = T::zero();
    for t in l..=r {
        sum = sum + power.clone() * table.b(t, r) * table.b(l, t);
        power = power * x.clone();
    }
    sum
}

/// `Σ = D R_Y Dᵀ` over degrees `m..=kmax`.
pub fn sigma_via_transform<T: Scalar>(params: &ModelParams<T>, kmax: usize) -> CovarianceMatrix<T> {
    sigma_via_transform_with(params, kmax, Clock::Draw)
}

/// [`sigma_via_transform`] under the given clock.
pub fn sigma_via_transform_with<T: Scalar>(params: &ModelParams<T>, kmax: usize, clock: Clock) -> CovarianceMatrix<T> {
    let table = CoefficientTable::new(params, kmax);
    let ry = CovarianceMatrix::from_fn(params.m(), kmax, |r, l| {
        if l > r {
            T::zero()
        } else {
            table.ry_with(clock, r, l)
        }
    })
    .symmetrized_from_lower();
    TransformMatrices::from_table(&table).congruence(&ry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn grid() -> Vec<ModelParams<f64>> {
        let mut out = Vec::new();
        for m in 1..=3usize {
            for delta in [-0.9 * m as f64, 0.0, 5.0] {
                out.push(ModelParams::new(m, delta).unwrap());
            }
        }
        out
    }

    #[test]
    fn exact_inverse() {
        for p in grid() {
            let t = TransformMatrices::new(&p.to_exact(), 30);
            assert_eq!(t.identity_residual(), BigRational::from_integer(0.into()));
            for k in p.m()..=30 {
                assert_eq!(t.c(k, k), &BigRational::from_integer(1.into()));
                assert_eq!(t.d(k, k), &BigRational::from_integer(1.into()));
            }
        }
    }

    #[test]
    fn binomial_identity_at_other_points() {
        for p in grid() {
            let e = p.to_exact();
            let table = CoefficientTable::new(&e, 25);
            for x in [0i64, 1, 2, -1] {
                let xr = BigRational::from_integer(x.into());
                for l in p.m()..=25 {
                    for r in l..=25 {
                        let lhs = binomial_identity_lhs(&table, l, r, &xr);
                        let rhs = table.b(l, r) * num_traits::pow(BigRational::from_integer((1 + x).into()), r - l);
                        assert_eq!(lhs, rhs, "x={x} l={l} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn enlarging_kmax_keeps_entries() {
        let p = ModelParams::new(2, 1.0).unwrap().to_exact();
        let small = sigma_via_transform(&p, 8);
        let large = sigma_via_transform(&p, 12);
        for r in 2..=8 {
            for l in 2..=8 {
                assert_eq!(small.get(r, l), large.get(r, l));
            }
        }
    }

    #[test]
    fn congruence_of_identity_is_d_dt() {
        let p = ModelParams::new(1, 0.5).unwrap().to_exact();
        let t = TransformMatrices::new(&p, 6);
        let id = CovarianceMatrix::from_fn(1, 6, |r, l| {
            BigRational::from_integer(i64::from(r == l).into())
        });
        let out = t.congruence(&id);
        for r in 1..=6 {
            for l in 1..=6 {
                let expected = (1..=r.min(l)).fold(BigRational::from_integer(0.into()), |acc, j| {
                    acc + t.d(r, j).clone() * t.d(l, j).clone()
                });
                assert_eq!(out.get(r, l), &expected);
            }
        }
    }
}
