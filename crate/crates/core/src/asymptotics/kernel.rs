//! The kernel `a(r, l)` and the covariance `R_Y` of the mixed process.

use super::coeffs::CoefficientTable;
use crate::params::ModelParams;
use crate::scalar::Scalar;

impl<T: Scalar> CoefficientTable<T> {
    /// `b_m^(r) - (r + δ)/(2m + δ) Σ_d b_d^(r) p_d` in closed form:
    /// `b_m^(r) (mr + 2m + mδ - r) / (mr + 2m + (m + 1)δ)`.
    pub fn s_closed(&self, r: usize) -> T {
        let p = self.params();
        let (m, delta) = (p.m_scalar(), p.delta().clone());
        let rr = T::usize(r);
        let num = m.clone() * rr.clone() + T::int(2) * m.clone() + m.clone() * delta.clone() - rr.clone();
        let den = m.clone() * rr + T::int(2) * m.clone() + (m + T::one()) * delta;
        self.b(self.m(), r) * num / den
    }

    /// `(r + δ)/(2m + δ) Σ_{d=m}^{r} b_d^(r) p_d`, as `b_m^(r) - s_closed(r)`
    /// which simplifies to `b_m^(r) (r + δ) / (mr + 2m + (m + 1)δ)`.
    pub fn t_closed(&self, r: usize) -> T {
        let p = self.params();
        let m = p.m_scalar();
        let den = m.clone() * T::usize(r) + T::int(2) * m.clone() + (m + T::one()) * p.delta().clone();
        self.b(self.m(), r) * p.weight(r) / den
    }

    /// [`CoefficientTable::t_closed`] by explicit summation.
    pub fn t_direct(&self, r: usize) -> T {
        let p = self.params();
        let m = self.m();
        let sum = (m..=r).fold(T::zero(), |acc, d| acc + self.b(d, r) * self.p(d).clone());
        p.weight(r) / p.growth_rate() * sum
    }

    /// Kernel `a(r, l)` for `m <= r, l <= kmax`.
    ///
    /// Every summand of the series over `h` beyond `max(r, l)` reduces to
    /// `b_m^(r) b_m^(l) (h + δ) p_h / (2m + δ)`, so the remainder is the closed
    /// weighted tail.
    pub fn a(&self, r: usize, l: usize) -> T {
        let p = self.params();
        let m = self.m();
        let growth = p.growth_rate();
        let extra = T::usize(m - 1);
        let (bmr, bml) = (self.b(m, r), self.b(m, l));
        let top = r.max(l);
        let mut sum = T::zero();
        for h in m..=top {
            let dr = self.b(h + 1, r) - self.b(h, r);
            let dl = self.b(h + 1, l) - self.b(h, l);
            let term = (bmr.clone() + dr.clone()) * (bml.clone() + dl.clone()) + extra.clone() * dr * dl;
            sum = sum + p.weight(h) * self.p(h).clone() * term;
        }
        sum = sum + bmr * bml * self.tail(top).clone();
        sum / growth
            - self.s_closed(r) * self.s_closed(l)
            - extra * self.t_closed(r) * self.t_closed(l)
    }

    /// `R_Y(r, l) = (2m + δ) / (r + l + 2m + 3δ) · a(r, l)`.
    pub fn ry(&self, r: usize, l: usize) -> T {
        self.ry_with(Clock::Draw, r, l)
    }

    /// `R_Y(r, l)` under the given clock.
    pub fn ry_with(&self, clock: Clock, r: usize, l: usize) -> T {
        let p = self.params();
        let growth = p.growth_rate();
        let den = clock.rate(p) * (T::usize(r + l) + T::int(2) * p.delta().clone()) + growth.clone();
        growth / den * self.a(r, l)
    }
}

/// Time unit of the regular variation behind `R_Y`.
///
/// With `Draw` the scaling coefficient of degree `k` varies with index
/// `(k + δ)/(2m + δ)` and `R_Y(r, l) = (2m + δ)/(r + l + 2m + 3δ) · a(r, l)`.
/// With `Vertex` the index is `m (k + δ)/(2m + δ)`, which is what the
/// coefficients have when time counts arrivals, and
/// `R_Y(r, l) = (2m + δ)/(m (r + l + 2δ) + 2m + δ) · a(r, l)`.
/// Both give the same covariance for `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    #[default]
    Draw,
    Vertex,
}

impl Clock {
    /// Multiplier of `(k + δ)/(2m + δ)` in the index: `1` or `m`.
    pub fn rate<T: Scalar>(self, params: &ModelParams<T>) -> T {
        match self {
            Clock::Draw => T::one(),
            Clock::Vertex => params.m_scalar(),
        }
    }
}

/// Kernel `a(r, l)`.
pub fn a_rl<T: Scalar>(params: &ModelParams<T>, r: usize, l: usize) -> T {
    CoefficientTable::new(params, r.max(l).max(params.m())).a(r, l)
}

/// Covariance `R_Y(r, l)` of the mixed process.
pub fn ry<T: Scalar>(params: &ModelParams<T>, r: usize, l: usize) -> T {
    CoefficientTable::new(params, r.max(l).max(params.m())).ry(r, l)
}
