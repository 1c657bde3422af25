//! Ricci solitons `Ric + ½ L_X g = ρ g` on charts, and the scalar
//! existence criterion `I(κ₁) = 0` for the Kähler–Ricci shrinkers used as
//! bases of warped products.

mod dancer_wang;
mod residual;

pub use dancer_wang::{
    dw_find_root, dw_find_root_with, dw_integral, dw_integral_with, dw_weighted_integral, DWIntegralSpec, DWRoot,
    DEFAULT_PANELS, SWEEP_POINTS,
};
pub use residual::{
    classify, hessian, lie_derivative_gradient, lie_derivative_metric, residual_at, soliton_residual, SolitonData,
    SolitonField, SolitonKind,
};
