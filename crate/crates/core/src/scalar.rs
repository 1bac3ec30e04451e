//! Scalar abstraction shared by the model, the statistics and the
//! asymptotic formulas.
//!
//! Everything that only needs field arithmetic is generic over [`Scalar`],
//! which is satisfied by `f32`, `f64` and the exact [`BigRational`]. Code that
//! needs logarithms (log-space Gamma ratios, regular-variation fits) is
//! generic over [`num_traits::Float`] instead.

use std::any::Any;
use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Div, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field-like scalar usable by every exact formula in this crate.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Embeds an integer. Panics only if the integer is not representable,
    /// which cannot happen for the implementors in this crate.
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar")
    }

    fn usize(n: usize) -> Self {
        Self::int(i64::try_from(n).expect("index fits in i64"))
    }

    /// Nearest `f64`, NaN if the value is not representable.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialOrd
        + Num
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// `out[u] = Σ_{i + j = u} x[i] y[j]`.
///
/// Rational inputs are brought to one denominator per vector first so the
/// products run on integers; other scalars use the plain double loop.
#[allow(clippy::ptr_arg)]
pub(crate) fn diagonal_sums<T: Scalar>(x: &Vec<T>, y: &Vec<T>) -> Vec<T> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let any_x: &dyn Any = x;
    let any_y: &dyn Any = y;
    if let (Some(xr), Some(yr)) = (any_x.downcast_ref::<Vec<BigRational>>(), any_y.downcast_ref::<Vec<BigRational>>()) {
        let out: Box<dyn Any> = Box::new(rational_diagonal_sums(xr, yr));
        return *out.downcast::<Vec<T>>().expect("same type");
    }
    let mut out = vec![T::zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] = out[i + j].clone() + a.clone() * b.clone();
        }
    }
    out
}

/// Numerators over the least common denominator.
fn common_denominator(v: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = v.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
    (v.iter().map(|q| q.numer() * (&den / q.denom())).collect(), den)
}

fn rational_diagonal_sums(x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
    let (xn, xd) = common_denominator(x);
    let (yn, yd) = common_denominator(y);
    let den = xd * yd;
    let mut out = vec![BigInt::zero(); x.len() + y.len() - 1];
    for (i, a) in xn.iter().enumerate() {
        for (j, b) in yn.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out.into_iter().map(|n| BigRational::new(n, den.clone())).collect()
}

/// Exact rational built from the shortest decimal representation of `x`.
///
/// `-0.9_f64` becomes `-9/10` rather than the dyadic value actually stored
/// in the float, so parameters typed by a user keep their decimal meaning.
/// Returns `None` for non-finite input.
pub fn rational_from_decimal(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    parse_decimal(&format!("{x}"))
}

/// Parses `[-]digits[.digits][e[-]digits]` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Some(if negative { -value } else { value })
}

/// Sum that keeps positive and negative contributions apart and combines
/// them once at the end.
#[derive(Debug, Clone)]
pub struct SplitSum<T> {
    positive: T,
    negative: T,
}

impl<T: Scalar> Default for SplitSum<T> {
    fn default() -> Self {
        Self { positive: T::zero(), negative: T::zero() }
    }
}

impl<T: Scalar> SplitSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: T) {
        if term.is_negative() {
            self.negative = self.negative.clone() - term;
        } else {
            self.positive = self.positive.clone() + term;
        }
    }

    /// Sum of absolute values of everything added so far.
    pub fn magnitude(&self) -> T {
        self.positive.clone() + self.negative.clone()
    }

    pub fn total(&self) -> T {
        self.positive.clone() - self.negative.clone()
    }
}

/// A real number stored as a sign and the logarithm of its magnitude.
///
/// `sign == 0` marks an exact zero, in which case `ln_abs` is meaningless
/// and kept at negative infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue<F> {
    sign: i8,
    ln_abs: F,
}

impl<F: Float> SignedLogValue<F> {
    pub fn zero() -> Self {
        Self { sign: 0, ln_abs: F::neg_infinity() }
    }

    pub fn one() -> Self {
        Self { sign: 1, ln_abs: F::zero() }
    }

    /// Builds a value from a sign and a log-magnitude. A zero sign yields
    /// [`SignedLogValue::zero`].
    pub fn from_parts(sign: i8, ln_abs: F) -> Self {
        match sign.cmp(&0) {
            Ordering::Equal => Self::zero(),
            Ordering::Greater => Self { sign: 1, ln_abs },
            Ordering::Less => Self { sign: -1, ln_abs },
        }
    }

    pub fn from_value(x: F) -> Self {
        if x.is_zero() {
            Self::zero()
        } else {
            Self::from_parts(if x > F::zero() { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn ln_abs(&self) -> F {
        self.ln_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Converts back to a plain float; overflows to ±inf like `exp`.
    pub fn value(&self) -> F {
        match self.sign {
            0 => F::zero(),
            s if s > 0 => self.ln_abs.exp(),
            _ => -self.ln_abs.exp(),
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        Self { sign: self.sign, ln_abs: -self.ln_abs }
    }
}

impl<F: Float> Mul for SignedLogValue<F> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        Self { sign: self.sign * rhs.sign, ln_abs: self.ln_abs + rhs.ln_abs }
    }
}

impl<F: Float> Div for SignedLogValue<F> {
    type Output = Self;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<F: Float> Neg for SignedLogValue<F> {
    type Output = Self;

    fn neg(self) -> Self {
        Self { sign: -self.sign, ln_abs: self.ln_abs }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` by the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2. Relative accuracy is about 1e-15 for f64.
pub fn ln_gamma<F: Float>(x: F) -> F {
    let c = |v: f64| F::from(v).expect("constant representable");
    let half = c(0.5);
    if x < half {
        // Γ(x)Γ(1-x) = π / sin(πx)
        let pi = c(std::f64::consts::PI);
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(F::one() - x);
    }
    let z = x - F::one();
    let mut acc = c(LANCZOS_COEFFS[0]);
    for (i, &coef) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + c(coef) / (z + c(i as f64));
    }
    let t = z + c(LANCZOS_G) + half;
    let half_ln_two_pi = c(0.918_938_533_204_672_8);
    half_ln_two_pi + (z + half) * t.ln() - t + acc.ln()
}

/// `ln n!`, exact summation for small `n` and `ln Γ(n+1)` beyond.
pub fn ln_factorial<F: Float>(n: u64) -> F {
    if n < 32 {
        (2..=n).fold(F::zero(), |acc, k| acc + F::from(k).expect("small integer").ln())
    } else {
        ln_gamma(F::from(n + 1).expect("integer representable"))
    }
}

/// Relative discrepancy `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference<T: Scalar>(a: &T, b: &T) -> T {
    let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    if scale.is_zero() {
        T::zero()
    } else {
        (a.clone() - b.clone()).abs() / scale
    }
}

/// `(-1)^n` as a scalar.
pub(crate) fn alternating<T: Scalar>(n: i64) -> T {
    if n.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_sums_agree_across_scalars() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let x = vec![q(1, 3), q(-2, 5), q(7, 6)];
        let y = vec![q(3, 4), q(1, 9)];
        let exact = diagonal_sums(&x, &y);
        let naive: Vec<BigRational> = (0..4)
            .map(|u| {
                let mut t = q(0, 1);
                for i in 0..3 {
                    if u >= i && u - i < 2 {
                        t += x[i].clone() * y[u - i].clone();
                    }
                }
                t
            })
            .collect();
        assert_eq!(exact, naive);
        let xf: Vec<f64> = x.iter().map(|v| v.to_f64_lossy()).collect();
        let yf: Vec<f64> = y.iter().map(|v| v.to_f64_lossy()).collect();
        for (a, b) in diagonal_sums(&xf, &yf).iter().zip(&naive) {
            assert!((a - b.to_f64_lossy()).abs() < 1e-15);
        }
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..25u32 {
            let got = ln_gamma(f64::from(n) + 1.0);
            fact *= f64::from(n);
            assert!((got - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn ln_gamma_half_integers_and_reflection() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(0.5_f64) - sqrt_pi.ln()).abs() < 1e-14);
        assert!((ln_gamma(1.5_f64) - (0.5 * sqrt_pi).ln()).abs() < 1e-14);
        // Γ(0.1) = 9.513507698668731836...
        assert!((ln_gamma(0.1_f64) - 9.513_507_698_668_732_f64.ln()).abs() < 1e-13);
        // |Γ(-0.5)| = 2√π
        assert!((ln_gamma(-0.5_f64) - (2.0 * sqrt_pi).ln()).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_is_generic_over_f32() {
        assert!((ln_gamma(5.0_f32) - 24.0_f32.ln()).abs() < 1e-5);
    }

    #[test]
    fn ln_factorial_continuous_across_switch() {
        let direct: f64 = (2..=40u64).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial::<f64>(40) - direct).abs() < 1e-11);
        assert_eq!(ln_factorial::<f64>(0), 0.0);
        assert_eq!(ln_factorial::<f64>(1), 0.0);
    }

    #[test]
    fn decimal_parsing_is_exact() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(rational_from_decimal(-0.9).unwrap(), r(-9, 10));
        assert_eq!(rational_from_decimal(5.0).unwrap(), r(5, 1));
        assert_eq!(rational_from_decimal(-2.7).unwrap(), r(-27, 10));
        assert_eq!(parse_decimal("1.25e2").unwrap(), r(125, 1));
        assert_eq!(parse_decimal("-3e-2").unwrap(), r(-3, 100));
        assert_eq!(parse_decimal(".5").unwrap(), r(1, 2));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("").is_none());
        assert!(rational_from_decimal(f64::NAN).is_none());
    }

    #[test]
    fn signed_log_arithmetic() {
        let a = SignedLogValue::from_value(-3.0_f64);
        let b = SignedLogValue::from_value(4.0_f64);
        assert!(((a * b).value() + 12.0).abs() < 1e-12);
        assert!(((a / b).value() + 0.75).abs() < 1e-12);
        assert_eq!((-a).sign(), 1);
        assert!(SignedLogValue::from_value(0.0_f64).is_zero());
        assert!((a * SignedLogValue::zero()).is_zero());
        assert_eq!(SignedLogValue::<f64>::from_parts(0, 3.0), SignedLogValue::zero());
    }

    #[test]
    fn split_sum_combines_once() {
        let mut s = SplitSum::<f64>::new();
        for x in [1.0, -2.0, 3.5, -0.5] {
            s.add(x);
        }
        assert_eq!(s.total(), 2.0);
        assert_eq!(s.magnitude(), 7.0);
    }

    #[test]
    fn relative_difference_handles_zero() {
        assert_eq!(relative_difference(&0.0_f64, &0.0), 0.0);
        assert!((relative_difference(&1.0_f64, &1.1) - 0.1 / 1.1).abs() < 1e-15);
    }
}
