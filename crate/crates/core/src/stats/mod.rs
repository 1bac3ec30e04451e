//! Exact expectations of the degree counts, fluctuation vectors and their
//! empirical covariance.

mod accumulator;
mod chi2;
mod expectation;
mod fluctuation;

pub use accumulator::{CovarianceAccumulator, CovarianceEstimate};
pub use chi2::{chi_square_gof, chi_square_two_sample};
pub use expectation::{exact_expected_counts, ExpectationTable};
pub(crate) use expectation::normalize;
pub use fluctuation::{fluctuation_vector, Centering, Centers, FluctuationVector};
