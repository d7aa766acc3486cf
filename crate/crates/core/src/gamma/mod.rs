//! Rational polyhedral sets, their Euler characteristics and lattice sums.

mod cell;
mod decompose;
mod lattice;
mod zeta;

pub use cell::{Interval, LinearRow, PolySet, Rat, RationalCell};
pub use decompose::{chi, chi_bounded, chi_of_box, chi_truncated, decompose_open, face_dim, MAX_DIM};
pub use lattice::{alpha_m, lattice_numerators, lattice_points, tilde_alpha, weight};
pub use zeta::{
    polytope_candidates, polytope_coefficient, polytope_terms_needed, zeta_polytope, AffineFormPW, AffinePiece,
};

pub(crate) use cell::parse_rat;
