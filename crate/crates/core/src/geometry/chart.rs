use std::fmt;
use std::sync::Arc;

use crate::dsl::{parse, Expr};
use crate::numerics::{cholesky, packed_index, Jet2, SymMatrix};
use crate::{Error, Real, Result};

use super::curvature::{curvature_from_jet, CurvatureAtPoint};

/// Packed metric components as jets in the chart coordinates.
pub type JetFn<T> = dyn Fn(&[T]) -> Result<Vec<Jet2<T>>> + Send + Sync;
/// Opaque metric closure, differentiated by central differences.
pub type MetricFn<T> = dyn Fn(&[T]) -> Result<SymMatrix<T>> + Send + Sync;

/// Where the metric components of a chart come from.
#[derive(Clone)]
pub enum MetricSource<T> {
    /// Packed upper-triangular expressions, differentiated exactly.
    Exprs(Vec<Expr>),
    /// Closure returning second-order jets directly (used for metrics
    /// composed from other metrics).
    Jet(Arc<JetFn<T>>),
    /// Opaque closure; derivatives by central differences with step
    /// `fd_step · span` per coordinate.
    Closure(Arc<MetricFn<T>>),
}

impl<T> fmt::Debug for MetricSource<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSource::Exprs(e) => f.debug_tuple("Exprs").field(e).finish(),
            MetricSource::Jet(_) => f.write_str("Jet(..)"),
            MetricSource::Closure(_) => f.write_str("Closure(..)"),
        }
    }
}

/// A metric on a coordinate box `[lo_i, hi_i]`.
#[derive(Debug, Clone)]
pub struct ChartManifold<T> {
    pub name: String,
    pub lo: Vec<T>,
    pub hi: Vec<T>,
    /// Fraction of each side trimmed from both ends when sampling.
    pub margin: T,
    pub source: MetricSource<T>,
    pub fd_step: T,
}

pub const DEFAULT_MARGIN: f64 = 0.02;

impl<T: Real> ChartManifold<T> {
    pub fn new(name: impl Into<String>, lo: Vec<T>, hi: Vec<T>, source: MetricSource<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidSpec("chart box needs lo < hi on every axis".into()));
        }
        let n = lo.len();
        if let MetricSource::Exprs(e) = &source {
            if e.len() != n * (n + 1) / 2 {
                return Err(Error::DimensionMismatch {
                    expected: n * (n + 1) / 2,
                    found: e.len(),
                });
            }
            if let Some(bad) = e.iter().find(|x| x.arity() > n) {
                return Err(Error::InvalidSpec(format!("metric component {bad} uses more than {n} variables")));
            }
        }
        Ok(Self {
            name: name.into(),
            lo,
            hi,
            margin: T::lit(DEFAULT_MARGIN),
            source,
            fd_step: T::lit(1e-4),
        })
    }

    /// Chart from metric component strings. `rows` is either the full
    /// `n × n` matrix (must be symmetric as text) or the packed upper
    /// triangle in row order.
    pub fn from_strings(
        name: impl Into<String>,
        vars: &[&str],
        lo: Vec<T>,
        hi: Vec<T>,
        comps: &[&str],
    ) -> Result<Self> {
        let n = vars.len();
        let parsed: Vec<Expr> = comps.iter().map(|c| parse(c, vars)).collect::<std::result::Result<_, _>>()?;
        let packed = if parsed.len() == n * n {
            let mut out = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in i..n {
                    if parsed[i * n + j] != parsed[j * n + i] {
                        return Err(Error::InvalidSpec(format!("metric entries ({i},{j}) and ({j},{i}) differ")));
                    }
                    out.push(parsed[i * n + j].clone());
                }
            }
            out
        } else {
            parsed
        };
        Self::new(name, lo, hi, MetricSource::Exprs(packed))
    }

    pub fn with_margin(mut self, margin: T) -> Self {
        self.margin = margin;
        self
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn check_domain(&self, p: &[T]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        let inside = p
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *x >= *a && *x <= *b);
        if !inside {
            return Err(Error::OutOfDomain {
                point: p.iter().map(|x| x.as_f64()).collect(),
            });
        }
        Ok(())
    }

    /// Sampling box after trimming the margin.
    pub fn inner_box(&self) -> (Vec<T>, Vec<T>) {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| {
                let m = (b - a) * self.margin;
                (a + m, b - m)
            })
            .unzip()
    }

    /// Packed metric components as jets at `p`.
    pub fn metric_jet(&self, p: &[T]) -> Result<Vec<Jet2<T>>> {
        self.check_domain(p)?;
        match &self.source {
            MetricSource::Exprs(es) => {
                let vars = Jet2::variables(p);
                es.iter()
                    .map(|e| e.eval_with(&vars).map_err(Error::from))
                    .collect()
            }
            MetricSource::Jet(f) => f(p),
            MetricSource::Closure(f) => self.fd_jet(f.as_ref(), p),
        }
    }

    fn fd_jet(&self, f: &MetricFn<T>, p: &[T]) -> Result<Vec<Jet2<T>>> {
        let n = self.dim();
        let m = n * (n + 1) / 2;
        let h: Vec<T> = (0..n).map(|i| self.fd_step * (self.hi[i] - self.lo[i])).collect();
        let at = |shift: &[(usize, T)]| -> Result<SymMatrix<T>> {
            let mut q = p.to_vec();
            for &(i, s) in shift {
                q[i] = q[i] + s;
            }
            f(&q)
        };
        let g0 = at(&[])?;
        let mut out: Vec<Jet2<T>> = (0..m)
            .map(|_| Jet2 {
                value: T::zero(),
                grad: vec![T::zero(); n],
                hess: vec![T::zero(); n * n],
            })
            .collect();
        for i in 0..n {
            for j in i..n {
                out[packed_index(n, i, j)].value = g0.get(i, j);
            }
        }
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        for k in 0..n {
            let gp = at(&[(k, h[k])])?;
            let gm = at(&[(k, -h[k])])?;
            for i in 0..n {
                for j in i..n {
                    let c = &mut out[packed_index(n, i, j)];
                    c.grad[k] = (gp.get(i, j) - gm.get(i, j)) / (two * h[k]);
                    c.hess[k * n + k] = (gp.get(i, j) - two * g0.get(i, j) + gm.get(i, j)) / (h[k] * h[k]);
                }
            }
            for l in (k + 1)..n {
                let pp = at(&[(k, h[k]), (l, h[l])])?;
                let pm = at(&[(k, h[k]), (l, -h[l])])?;
                let mp = at(&[(k, -h[k]), (l, h[l])])?;
                let mm = at(&[(k, -h[k]), (l, -h[l])])?;
                for i in 0..n {
                    for j in i..n {
                        let d = (pp.get(i, j) - pm.get(i, j) - mp.get(i, j) + mm.get(i, j)) / (four * h[k] * h[l]);
                        let c = &mut out[packed_index(n, i, j)];
                        c.hess[k * n + l] = d;
                        c.hess[l * n + k] = d;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn metric(&self, p: &[T]) -> Result<SymMatrix<T>> {
        self.check_domain(p)?;
        let n = self.dim();
        let g = match &self.source {
            MetricSource::Closure(f) => f(p)?,
            MetricSource::Exprs(es) => {
                let vals: Vec<T> = es.iter().map(|e| e.eval(p)).collect::<std::result::Result<_, _>>()?;
                SymMatrix::from_fn(n, |i, j| vals[packed_index(n, i, j)])
            }
            MetricSource::Jet(f) => {
                let j = f(p)?;
                SymMatrix::from_fn(n, |a, b| j[packed_index(n, a, b)].value)
            }
        };
        cholesky(&g)?;
        Ok(g)
    }

    pub fn curvature(&self, p: &[T]) -> Result<CurvatureAtPoint<T>> {
        let jet = self.metric_jet(p)?;
        curvature_from_jet(self.dim(), &jet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn s2() -> ChartManifold<f64> {
        ChartManifold::from_strings("s2", &["x1", "x2"], vec![0.0, 0.0], vec![PI, 2.0 * PI], &["1", "0", "sin(x1)^2"])
            .unwrap()
    }

    #[test]
    fn sphere_chart_curvature() {
        let m = s2();
        let k = m.curvature(&[0.8, 1.0]).unwrap();
        assert!((k.christoffel(0, 1, 1) + 0.8f64.sin() * 0.8f64.cos()).abs() < 1e-14);
        assert!((k.min_ricci_eig().unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(s2().curvature(&[-0.1, 1.0]), Err(Error::OutOfDomain { .. })));
        assert!(matches!(s2().curvature(&[0.1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn closure_source_matches_exprs() {
        let f: Arc<MetricFn<f64>> = Arc::new(|p: &[f64]| Ok(SymMatrix::from_diag(&[1.0, p[0].sin().powi(2)])));
        let m = ChartManifold::new("s2fd", vec![0.0, 0.0], vec![PI, 2.0 * PI], MetricSource::Closure(f)).unwrap();
        let a = m.curvature(&[0.8, 1.0]).unwrap();
        let b = s2().curvature(&[0.8, 1.0]).unwrap();
        for (x, y) in a.riemann.iter().zip(&b.riemann) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn full_matrix_strings_must_be_symmetric() {
        let r = ChartManifold::<f64>::from_strings("bad", &["x", "y"], vec![0.0; 2], vec![1.0; 2], &["1", "x", "y", "1"]);
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
        let ok = ChartManifold::<f64>::from_strings("ok", &["x", "y"], vec![0.0; 2], vec![1.0; 2], &["2", "x", "x", "2"]);
        assert!(ok.is_ok());
    }

    #[test]
    fn indefinite_metric_rejected() {
        let m = ChartManifold::<f64>::from_strings("neg", &["x"], vec![0.0], vec![1.0], &["x - 0.5"]).unwrap();
        assert_eq!(m.metric(&[0.25]).unwrap_err(), Error::NotPositiveDefinite);
    }
}
