//! Exact arithmetic: Laurent polynomials in `L` and rational series in `T`
//! whose denominators are products of `1 − L^a T^b`.

mod dagger;
mod fit;
mod hadamard;
mod laurent;

pub use dagger::{DaggerSeries, Factor, SeriesDegree, SeriesPrefix, TPoly};
pub use fit::{fit, fit_integers, with_multiplicity, FitOptions, MIN_MARGIN};
pub use hadamard::{hadamard, pair_denominator, VERIFY_MARGIN};
pub use laurent::LaurentPoly;

pub(crate) use laurent::{ck_add, ck_mul};
