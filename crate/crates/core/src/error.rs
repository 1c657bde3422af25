use thiserror::Error;

use crate::dsl::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("quadrature did not reach tolerance on [{lo}, {hi}]")]
    MaxSubdivisions { lo: f64, hi: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("plane is degenerate (area term {area:e})")]
    DegeneratePlane { area: f64 },
    #[error("projection differential has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("fibers are not totally geodesic (|T| = {norm:e})")]
    NotTotallyGeodesic { norm: f64 },
    #[error("discrepancy {discrepancy:e} exceeds tolerance {tolerance:e} at {witness}")]
    ToleranceExceeded {
        discrepancy: f64,
        tolerance: f64,
        witness: String,
    },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no certifying parameter found after {iterations} steps")]
    NotFound { iterations: usize },
    #[error("verdicts agree at both ends of the bracket")]
    SameSign,
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("expected a unit element, norm is {norm}")]
    NotUnit { norm: f64 },
    #[error("constraint residual {residual:e} exceeds tolerance")]
    ConstraintViolated { residual: f64 },
    #[error("projection failed on degenerate input")]
    ProjectionFailed,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
