//! Riemannian metrics and their curvature.
//!
//! Two backends share one output type, [`CurvatureAtPoint`]:
//!
//! * [`ChartManifold`]: metric components on a coordinate box. Expression
//!   metrics are differentiated exactly with second-order jets; opaque
//!   closures by central differences.
//! * [`FrameManifold`]: a global frame with constant structure coefficients
//!   and constant metric (left-invariant metrics on Lie groups). Connection
//!   coefficients come from the Koszul formula.
//!
//! Sign conventions are documented on [`CurvatureAtPoint`].

mod chart;
mod curvature;
mod frame;
mod grid;

pub use chart::{ChartManifold, JetFn, MetricFn, MetricSource, DEFAULT_MARGIN};
pub use curvature::{curvature_from_frame, curvature_from_jet, metric_compatibility_residual, CurvatureAtPoint};
pub use frame::FrameManifold;
pub use grid::{GridKind, GridSpec};

use crate::numerics::SymMatrix;
use crate::{Real, Result};

/// Either backend.
#[derive(Debug, Clone)]
pub enum ManifoldRep<T> {
    Chart(ChartManifold<T>),
    Frame(FrameManifold<T>),
}

impl<T: Real> ManifoldRep<T> {
    pub fn name(&self) -> &str {
        match self {
            ManifoldRep::Chart(c) => &c.name,
            ManifoldRep::Frame(f) => &f.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ManifoldRep::Chart(c) => c.dim(),
            ManifoldRep::Frame(f) => f.dim(),
        }
    }

    /// Number of point coordinates: the chart dimension, or 0 for a frame
    /// (homogeneous, evaluated at a single abstract point).
    pub fn point_dim(&self) -> usize {
        match self {
            ManifoldRep::Chart(c) => c.dim(),
            ManifoldRep::Frame(_) => 0,
        }
    }

    pub fn metric(&self, p: &[T]) -> Result<SymMatrix<T>> {
        match self {
            ManifoldRep::Chart(c) => c.metric(p),
            ManifoldRep::Frame(f) => Ok(f.q.clone()),
        }
    }

    pub fn curvature(&self, p: &[T]) -> Result<CurvatureAtPoint<T>> {
        match self {
            ManifoldRep::Chart(c) => c.curvature(p),
            ManifoldRep::Frame(f) => f.curvature(),
        }
    }

    /// Sample points for `grid` inside the margin-trimmed box.
    pub fn sample_points(&self, grid: &GridSpec) -> Vec<Vec<T>> {
        match self {
            ManifoldRep::Chart(c) => {
                let (lo, hi) = c.inner_box();
                grid.points(&lo, &hi)
            }
            ManifoldRep::Frame(_) => vec![Vec::new()],
        }
    }
}

impl<T> From<ChartManifold<T>> for ManifoldRep<T> {
    fn from(c: ChartManifold<T>) -> Self {
        ManifoldRep::Chart(c)
    }
}

impl<T> From<FrameManifold<T>> for ManifoldRep<T> {
    fn from(f: FrameManifold<T>) -> Self {
        ManifoldRep::Frame(f)
    }
}

/// `Γ^k_ij` at `p`, stored at `k n² + i n + j`.
pub fn christoffel<T: Real>(m: &ManifoldRep<T>, p: &[T]) -> Result<Vec<T>> {
    Ok(m.curvature(p)?.gamma)
}

/// `R_ijkl` at `p`.
pub fn riemann<T: Real>(m: &ManifoldRep<T>, p: &[T]) -> Result<Vec<T>> {
    Ok(m.curvature(p)?.riemann)
}

pub fn ricci<T: Real>(m: &ManifoldRep<T>, p: &[T]) -> Result<SymMatrix<T>> {
    Ok(m.curvature(p)?.ricci)
}

pub fn scalar<T: Real>(m: &ManifoldRep<T>, p: &[T]) -> Result<T> {
    Ok(m.curvature(p)?.scalar)
}

pub fn sectional<T: Real>(m: &ManifoldRep<T>, p: &[T], x: &[T], y: &[T]) -> Result<T> {
    m.curvature(p)?.sectional(x, y)
}

pub fn nonreduced_k<T: Real>(m: &ManifoldRep<T>, p: &[T], x: &[T], y: &[T]) -> Result<T> {
    Ok(m.curvature(p)?.nonreduced_k(x, y))
}

/// Smallest eigenvalue of `Ric v = λ g v` at `p`.
pub fn min_ricci_eig<T: Real>(m: &ManifoldRep<T>, p: &[T]) -> Result<T> {
    m.curvature(p)?.min_ricci_eig()
}
