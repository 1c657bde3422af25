//! Curvature of Riemannian metrics, canonical variations of Riemannian
//! submersions and sampled certification of positive Ricci curvature.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). Concrete `f64` aliases for the common
//! types live at the crate root; the command line front end and the
//! acceptance suite use those.
//!
//! Module map:
//!
//! * [`numerics`]: dense small matrices, generalized eigenvalues, forward-mode
//!   jets, quaternions, quadrature, bracketing roots and samplers.
//! * [`dsl`]: scalar expression language used for metric components, warp
//!   functions, potentials and projections.
//! * [`geometry`]: chart and frame backends, Christoffel symbols, Riemann,
//!   Ricci and sectional curvature.
//! * [`submersion`]: horizontal/vertical splitting, O'Neill tensors, the
//!   canonical variation and its closed-form curvature formulas.
//! * [`certifier`]: the Ricci quadratic in the mixing parameter, its
//!   discriminant, the search for a certifying deformation and direct
//!   eigenvalue certification.
//! * [`warped`]: warped products with an exponential warp and a shift search.
//! * [`soliton`]: Ricci soliton residuals and the Dancer–Wang integral.
//! * [`catalog`]: builtin manifolds and submersions, and the quaternionic
//!   group actions on `Sp(2)`, `S^7` and `Sp(2, m)`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

pub mod catalog;
pub mod certifier;
pub mod dsl;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod soliton;
pub mod submersion;
pub mod warped;

pub use error::{Error, Result};

/// Scalar field used throughout the crate.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Sum
    + 'static
{
    /// Converts an `f64` literal. Every value used as a literal in this
    /// crate is representable in both `f32` and `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Quat = numerics::Quaternion<f64>;
pub type Matrix = numerics::SymMatrix<f64>;
pub type Dense = numerics::Mat<f64>;
pub type Manifold = geometry::ManifoldRep<f64>;
pub type Chart = geometry::ChartManifold<f64>;
pub type Frame = geometry::FrameManifold<f64>;
pub type Curvature = geometry::CurvatureAtPoint<f64>;
pub type Submersion = submersion::NumericSubmersion<f64>;
pub type ClosedForm = submersion::ClosedFormSubmersionData<f64>;
pub type Warped = warped::WarpedProduct<f64>;
pub type Sp2 = catalog::Sp2Element<f64>;
pub type Sp2m = catalog::Sp2mElement<f64>;
