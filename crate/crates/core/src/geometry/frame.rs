use crate::numerics::SymMatrix;
use crate::{Error, Real, Result};

use super::curvature::{curvature_from_frame, CurvatureAtPoint};

/// A global frame `e_1 … e_n` with constant structure coefficients
/// `[e_i, e_j] = c^k_ij e_k` and constant metric `g(e_i, e_j) = q_ij`, i.e. a
/// left-invariant metric on a Lie group. The geometry is the same at every
/// point, so curvature queries ignore the point argument.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameManifold<T> {
    pub name: String,
    n: usize,
    /// `c^k_ij` at `k n² + i n + j`.
    c: Vec<T>,
    pub q: SymMatrix<T>,
}

impl<T: Real> FrameManifold<T> {
    pub fn new(name: impl Into<String>, n: usize, c: Vec<T>, q: SymMatrix<T>) -> Result<Self> {
        if c.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: c.len(),
            });
        }
        if q.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.dim(),
            });
        }
        let m = Self {
            name: name.into(),
            n,
            c,
            q,
        };
        let tol = T::lit(1e-10);
        if m.antisymmetry_residual() > tol {
            return Err(Error::InvalidSpec("structure coefficients are not antisymmetric".into()));
        }
        if m.jacobi_residual() > tol {
            return Err(Error::InvalidSpec(format!(
                "Jacobi identity fails (residual {:e})",
                m.jacobi_residual().as_f64()
            )));
        }
        crate::numerics::cholesky(&m.q)?;
        Ok(m)
    }

    /// Unit quaternions with the left-invariant frame `i, j, k`:
    /// `[e_i, e_j] = 2 ε_ijk e_k`, metric `q` in that frame.
    pub fn s3(name: impl Into<String>, q: SymMatrix<T>) -> Result<Self> {
        let mut c = vec![T::zero(); 27];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[(k * 3 + i) * 3 + j] = T::lit(2.0);
            c[(k * 3 + j) * 3 + i] = T::lit(-2.0);
        }
        Self::new(name, 3, c, q)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn structure(&self, k: usize, i: usize, j: usize) -> T {
        self.c[(k * self.n + i) * self.n + j]
    }

    /// `[X, Y]` in frame components.
    pub fn bracket(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        s = s + self.structure(k, i, j) * x[i] * y[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn antisymmetry_residual(&self) -> T {
        let n = self.n;
        let mut m = T::zero();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    m = m.max((self.structure(k, i, j) + self.structure(k, j, i)).abs());
                }
            }
        }
        m
    }

    pub fn jacobi_residual(&self) -> T {
        let n = self.n;
        let c = |k, i, j| self.structure(k, i, j);
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = T::zero();
                        for m in 0..n {
                            s = s + c(m, i, j) * c(l, m, k) + c(m, j, k) * c(l, m, i) + c(m, k, i) * c(l, m, j);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Same frame and brackets with a different metric.
    pub fn with_metric(&self, q: SymMatrix<T>) -> Result<Self> {
        Self::new(self.name.clone(), self.n, self.c.clone(), q)
    }

    pub fn curvature(&self) -> Result<CurvatureAtPoint<T>> {
        curvature_from_frame(self.n, &self.c, &self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn berger_sectional() {
        let eps: f64 = 0.25;
        let m = FrameManifold::s3("berger", SymMatrix::from_diag(&[eps, 1.0, 1.0])).unwrap();
        let k = m.curvature().unwrap();
        let s = k.sectional(&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert!((s - (4.0 - 3.0 * eps)).abs() < 1e-14);
        let ev = k.ricci_eigenvalues().unwrap();
        let mut want = [2.0 * eps, 4.0 - 2.0 * eps, 4.0 - 2.0 * eps];
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_non_lie_brackets() {
        let mut c = vec![0.0; 8];
        // c^1_{00} = 1: [e0, e0] must vanish
        c[1] = 1.0;
        assert!(FrameManifold::new("bad", 2, c, SymMatrix::identity(2)).is_err());
    }

    #[test]
    fn bracket_of_quaternion_frame() {
        let m = FrameManifold::<f64>::s3("s3", SymMatrix::identity(3)).unwrap();
        assert_eq!(m.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), vec![0.0, 0.0, 2.0]);
        assert!(m.jacobi_residual() == 0.0);
    }
}
