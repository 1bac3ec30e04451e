//! Preferential attachment with affine weights `degree + δ`: simulation,
//! exact expectations, the martingale behind the degree-count central limit
//! theorem, and the exact limiting covariance of the fluctuations.
//!
//! Formula code is generic over the scalar. Use [`Params`] for simulation and
//! quick evaluation in `f64`, and [`ExactParams`] when results must be exact.

#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod error;
pub mod experiment;
pub mod martingale;
pub mod matrix;
pub mod model;
pub mod params;
pub mod scalar;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::CovarianceMatrix;
pub use params::ModelParams;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;
/// Parameters for simulation and `f64` evaluation.
pub type Params = ModelParams<f64>;
/// Parameters in exact rational arithmetic.
pub type ExactParams = ModelParams<Exact>;
