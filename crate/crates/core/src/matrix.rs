//! Dense symmetric matrices indexed by degree.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{relative_difference, Scalar};

/// Square matrix over degrees `m..=kmax`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T> {
    m: usize,
    kmax: usize,
    entries: Vec<T>,
}

impl<T: Scalar> CovarianceMatrix<T> {
    /// Builds the matrix from `f(r, l)` evaluated at every degree pair.
    pub fn from_fn<F: FnMut(usize, usize) -> T>(m: usize, kmax: usize, mut f: F) -> Self {
        assert!(kmax >= m, "kmax = {kmax} below m = {m}");
        let mut entries = Vec::with_capacity((kmax - m + 1).pow(2));
        for r in m..=kmax {
            for l in m..=kmax {
                entries.push(f(r, l));
            }
        }
        Self { m, kmax, entries }
    }

    /// Row-major entries for degrees `m..=kmax`.
    pub fn from_rows(m: usize, kmax: usize, entries: Vec<T>) -> Result<Self> {
        let n = kmax.checked_sub(m).map(|d| d + 1).unwrap_or(0);
        if n == 0 || entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} entries for degrees {m}..={kmax}", entries.len())));
        }
        Ok(Self { m, kmax, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Number of rows.
    pub fn dim(&self) -> usize {
        self.kmax - self.m + 1
    }

    fn index(&self, r: usize, l: usize) -> usize {
        assert!(
            (self.m..=self.kmax).contains(&r) && (self.m..=self.kmax).contains(&l),
            "({r}, {l}) outside degrees {}..={}",
            self.m,
            self.kmax
        );
        (r - self.m) * self.dim() + (l - self.m)
    }

    pub fn get(&self, r: usize, l: usize) -> &T {
        &self.entries[self.index(r, l)]
    }

    pub fn set(&mut self, r: usize, l: usize, value: T) {
        let i = self.index(r, l);
        self.entries[i] = value;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<T> {
        (self.m..=self.kmax).map(|k| self.get(k, k).clone()).collect()
    }

    pub fn trace(&self) -> T {
        (self.m..=self.kmax).fold(T::zero(), |acc, k| acc + self.get(k, k).clone())
    }

    /// Copies every entry below the diagonal to its mirror above.
    pub fn symmetrized_from_lower(mut self) -> Self {
        for r in self.m..=self.kmax {
            for l in r + 1..=self.kmax {
                let v = self.get(l, r).clone();
                self.set(r, l, v);
            }
        }
        self
    }

    /// Largest relative difference between mirrored entries.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for r in self.m..=self.kmax {
            for l in r + 1..=self.kmax {
                let d = relative_difference(self.get(r, l), self.get(l, r));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// The principal block over degrees `m..=kmax`.
    pub fn truncated(&self, kmax: usize) -> Self {
        assert!(kmax <= self.kmax);
        Self::from_fn(self.m, kmax, |r, l| self.get(r, l).clone())
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> CovarianceMatrix<U> {
        CovarianceMatrix { m: self.m, kmax: self.kmax, entries: self.entries.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> CovarianceMatrix<f64> {
        self.map(Scalar::to_f64_lossy)
    }
}

impl CovarianceMatrix<f64> {
    /// Eigenvalues of the symmetric part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let a = DMatrix::from_row_slice(n, n, &self.entries);
        let sym = (&a + a.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// True when the smallest eigenvalue is at least `-tol * trace`.
    pub fn is_psd(&self, tol: f64) -> bool {
        let floor = -tol * self.trace().abs();
        self.eigenvalues().first().is_none_or(|&e| e >= floor)
    }
}
