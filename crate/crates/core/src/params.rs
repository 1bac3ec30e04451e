use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{rational_from_decimal, Scalar};

/// Model parameters: `m` edges per arriving vertex and the affine offset
/// `delta` in the attachment weight `degree + delta`.
///
/// Construction enforces `m >= 1` and `delta > -m`, so every attachment
/// weight of an existing vertex is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T = f64> {
    m: usize,
    delta: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(m: usize, delta: T) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        // negated so NaN is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(delta > -T::usize(m)) || !delta.to_f64_lossy().is_finite() {
            return Err(Error::InvalidParams(format!("delta = {delta:?} must exceed -m = -{m}")));
        }
        Ok(Self { m, delta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> &T {
        &self.delta
    }

    /// `m` embedded in the scalar type.
    pub fn m_scalar(&self) -> T {
        T::usize(self.m)
    }

    /// `2m + delta`, the asymptotic growth rate of the total attachment weight.
    pub fn growth_rate(&self) -> T {
        T::usize(2 * self.m) + self.delta.clone()
    }

    /// Attachment weight `k + delta` of a vertex with degree `k`.
    pub fn weight(&self, k: usize) -> T {
        T::usize(k) + self.delta.clone()
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        ModelParams { m: self.m, delta: self.delta.to_f64_lossy() }
    }
}

impl ModelParams<f64> {
    /// Exact rational parameters, reading `delta` by its shortest decimal
    /// representation (so `-0.9` is exactly `-9/10`).
    pub fn to_exact(&self) -> ModelParams<BigRational> {
        let delta = rational_from_decimal(self.delta).expect("validated delta is finite");
        ModelParams { m: self.m, delta }
    }
}

impl<T: Scalar + std::fmt::Display> std::fmt::Display for ModelParams<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "m={} delta={}", self.m, self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_m_and_delta() {
        assert!(ModelParams::new(0, 0.0).is_err());
        assert!(ModelParams::new(2, -2.0).is_err());
        assert!(ModelParams::new(2, -1.999).is_ok());
        assert!(ModelParams::new(3, -1.5).is_ok());
        assert!(ModelParams::new(1, f64::NAN).is_err());
        assert!(ModelParams::new(1, f64::INFINITY).is_err());
    }

    #[test]
    fn exact_conversion_keeps_decimal_value() {
        let p = ModelParams::new(2, -1.8).unwrap().to_exact();
        assert_eq!(*p.delta(), BigRational::new((-9).into(), 5.into()));
        assert_eq!(p.growth_rate(), BigRational::new(11.into(), 5.into()));
    }
}
