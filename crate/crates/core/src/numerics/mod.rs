//! Small dense linear algebra, forward-mode differentiation, quaternions,
//! quadrature, bracketing roots and deterministic samplers.
//!
//! Matrices are row-major and at most [`MAX_DIM`] on a side.

mod ad;
mod eigen;
mod matrix;
mod quadrature;
mod quaternion;
mod roots;
mod sampling;

pub use ad::{Dual, Jet2, Number};
pub use eigen::{generalized_eigenvalues, sym_eigen, sym_generalized_eigen_min};
pub use matrix::{cholesky, invert, packed_index, solve, Mat, SymMatrix};
pub use quadrature::{adaptive_quadrature, gauss_legendre, gauss_legendre_rule};
pub use quaternion::{quat_conj, quat_mul, Quaternion};
pub use roots::{bisect, sign_changes};
pub use sampling::{gram_schmidt, halton, seeded_rng, SphereSampler};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 32;
