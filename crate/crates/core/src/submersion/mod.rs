//! Riemannian submersions, the O'Neill tensors and the canonical variation.
//!
//! Two backends feed the same curvature formulas:
//!
//! * [`NumericSubmersion`]: a projection between charts given by
//!   expressions. The splitting, `A`, the fiber second fundamental form and
//!   the canonical variation come from exact jets; `∇A` uses central
//!   differences of the components of `A`.
//! * [`ClosedFormSubmersionData`]: curvature tensors and `A`, `∇A` supplied
//!   in a split orthonormal frame at one point (homogeneous examples). A
//!   numeric submersion produces the same type at any point through
//!   [`NumericSubmersion::point_data`].
//!
//! The variation formulas take g-orthonormal inputs and return non-reduced
//! curvatures `R̃(X, Y, Y, X)`.

mod closed;
mod numeric;
mod variation;

pub use closed::{frame_canonical_metric, ClosedFormSubmersionData, Realization};
pub use numeric::{change_basis4, NumericSubmersion, Splitting, NABLA_A_STEP, RANK_THRESHOLD};
pub use variation::{
    cross_check_variation, variation_curvature, CanonicalVariation, CrossCheck, VariationArgs, VariationSource,
};

/// Fiber second fundamental forms above this norm are rejected.
pub const TOTALLY_GEODESIC_TOL: f64 = 1e-6;

/// Max of `|T|` over the given points.
pub fn check_totally_geodesic<T: crate::Real>(s: &NumericSubmersion<T>, points: &[Vec<T>]) -> crate::Result<T> {
    let mut worst = T::zero();
    for p in points {
        worst = worst.max(s.t_norm(p)?);
    }
    Ok(worst)
}
