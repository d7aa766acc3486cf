//! Exact computations around the monodromy / arc-space identity
//! `χ_c(X_{m,x}) = Λ(M_x^m)` for hypersurface singularities.
//!
//! - [`algebra`]: Laurent polynomials in `L` and rational series in `T`.
//! - [`gamma`]: piecewise-linear sets, Euler characteristics and weighted
//!   lattice-point series.
//! - [`jets`]: jet-space constraint systems, finite-field point counts and
//!   the resulting Euler characteristics and zeta coefficients.
//! - [`resolution`]: A'Campo and Denef–Loeser formulas from embedded
//!   resolution data.
//! - [`cli`]: the `milnor` command-line front end.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod gamma;
pub mod jets;
pub mod resolution;

pub use error::{Error, Result};
