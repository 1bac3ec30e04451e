//! Limiting quantities: the degree distribution `p_k`, the coefficients
//! `b_j^(k)`, the kernel `a(r, l)`, `R_Y`, the transforms `C`, `D` and the
//! covariance `R_Z` by two independent routes.
//!
//! Everything is generic over [`Scalar`](crate::scalar::Scalar). The
//! closed forms involve alternating sums whose cancellation grows with the
//! degree, so covariance entries meant to be trusted to many digits should
//! be computed with exact rationals (see [`rz_matrix_exact`]).

mod coeffs;
mod covariance;
mod kernel;
mod pmf;
mod transform;

pub use coeffs::{coeff_b, coeff_b_log, CoefficientTable};
pub use covariance::{rz_direct, rz_matrix, rz_matrix_exact, rz_matrix_with, sigma_via_transform_exact};
pub use kernel::{a_rl, ry, Clock};
pub use pmf::{ln_pk, pk, pk_table, weighted_mass, weighted_tail};
pub use transform::{binomial_identity_lhs, sigma_via_transform, sigma_via_transform_with, TransformMatrices};
