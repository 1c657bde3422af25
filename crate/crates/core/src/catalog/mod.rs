//! Builtin manifolds and submersions, and the quaternionic group actions.

mod builtins;
mod hopf;
mod quaternionic;

pub use builtins::{
    berger_sphere, builtin, builtin_from_str, flat_torus, flat_torus_frame, product, product_submersion,
    round_sphere, Builtin, BuiltinArg, BuiltinSpec, BUILTIN_NAMES, POLAR_INSET,
};
pub use hopf::{constant_curvature_tensor, graph_sphere_chart, hopf_s3_s2, hopf_s7_s4, HopfModel};
pub use quaternionic::{
    antipodal, bullet_action, freeness_check, h, h_tilde, partner, project_to_sp2, random_s7, random_sp2,
    random_sp2_from, random_unit_quat, s7_action, sp2_projection, star_action, wilhelm_action, FreenessReport,
    S4Point, S7Point, Sp2Element, Sp2mElement, UNIT_TOL,
};
