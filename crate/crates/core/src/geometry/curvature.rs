use num_traits::{Float, Zero};

use crate::numerics::{generalized_eigenvalues, invert, packed_index, Jet2, Mat, SymMatrix};
use crate::{Error, Real, Result};

/// Christoffel symbols, the fully covariant Riemann tensor, Ricci and scalar
/// curvature at one point, in the coordinate (chart) or frame basis.
///
/// Conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`,
/// `R_ijkl = g(R(e_i,e_j)e_k, e_l)`, `Ric_jk = Σ_i R^i_ijk`. With these the
/// round unit sphere has `R(X,Y,Y,X) = 1` on orthonormal pairs and
/// `Ric = (n−1) g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureAtPoint<T> {
    n: usize,
    /// Metric in the basis used for every other field.
    pub g: SymMatrix<T>,
    /// `Γ^k_ij` stored at `k n² + i n + j`.
    pub gamma: Vec<T>,
    /// `R_ijkl` stored at `((i n + j) n + k) n + l`.
    pub riemann: Vec<T>,
    pub ricci: SymMatrix<T>,
    pub scalar: T,
}

impl<T: Real> CurvatureAtPoint<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> T {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        let n = self.n;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    /// `R(X, Y, Z, W) = g(R(X,Y)Z, W)`.
    pub fn riemann_form(&self, x: &[T], y: &[T], z: &[T], w: &[T]) -> T {
        let n = self.n;
        let mut s = T::zero();
        for i in 0..n {
            if x[i] == T::zero() {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == T::zero() {
                    continue;
                }
                for k in 0..n {
                    let xyz = xy * z[k];
                    if xyz == T::zero() {
                        continue;
                    }
                    for l in 0..n {
                        s = s + xyz * w[l] * self.r(i, j, k, l);
                    }
                }
            }
        }
        s
    }

    /// Non-reduced sectional curvature `R(X, Y, Y, X)`.
    pub fn nonreduced_k(&self, x: &[T], y: &[T]) -> T {
        self.riemann_form(x, y, y, x)
    }

    /// Sectional curvature of the plane spanned by `X`, `Y`.
    pub fn sectional(&self, x: &[T], y: &[T]) -> Result<T> {
        let xx = self.g.quad(x);
        let yy = self.g.quad(y);
        let xy = self.g.bilinear(x, y);
        let area = xx * yy - xy * xy;
        if area < T::lit(1e-12) {
            return Err(Error::DegeneratePlane {
                area: area.as_f64(),
            });
        }
        Ok(self.nonreduced_k(x, y) / area)
    }

    pub fn ricci_form(&self, x: &[T], y: &[T]) -> T {
        self.ricci.bilinear(x, y)
    }

    /// Smallest eigenvalue of the pencil `(Ric, g)`.
    pub fn min_ricci_eig(&self) -> Result<T> {
        Ok(self.ricci_eigenvalues()?[0])
    }

    /// Eigenvalues of `(Ric, g)` in ascending order.
    pub fn ricci_eigenvalues(&self) -> Result<Vec<T>> {
        generalized_eigenvalues(&self.ricci, &self.g)
    }

    /// Largest violation of `R_ijkl = −R_jikl = −R_ijlk = R_klij`.
    pub fn symmetry_residual(&self) -> T {
        let n = self.n;
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.r(i, j, k, l);
                        m = m
                            .max((r + self.r(j, i, k, l)).abs())
                            .max((r + self.r(i, j, l, k)).abs())
                            .max((r - self.r(k, l, i, j)).abs());
                    }
                }
            }
        }
        m
    }

    /// Largest first-Bianchi residual `R_ijkl + R_jkil + R_kijl`.
    pub fn bianchi_residual(&self) -> T {
        let n = self.n;
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.r(i, j, k, l) + self.r(j, k, i, l) + self.r(k, i, j, l);
                        m = m.max(s.abs());
                    }
                }
            }
        }
        m
    }
}

fn lower_riemann<T: Real>(n: usize, up: &[T], g: &SymMatrix<T>) -> Vec<T> {
    // up[((l n + i) n + j) n + k] = R^l_ijk
    let mut out = vec![T::zero(); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = T::zero();
                    for m in 0..n {
                        s = s + up[((m * n + i) * n + j) * n + k] * g.get(m, l);
                    }
                    out[((i * n + j) * n + k) * n + l] = s;
                }
            }
        }
    }
    out
}

fn assemble<T: Real>(n: usize, g: SymMatrix<T>, gamma: Vec<T>, up: Vec<T>) -> Result<CurvatureAtPoint<T>> {
    let riemann = lower_riemann(n, &up, &g);
    let ricci = SymMatrix::from_fn(n, |j, k| {
        let mut s = T::zero();
        let mut t = T::zero();
        for i in 0..n {
            s = s + up[((i * n + i) * n + j) * n + k];
            t = t + up[((i * n + i) * n + k) * n + j];
        }
        // Symmetric in exact arithmetic; average away rounding.
        (s + t) * T::lit(0.5)
    });
    let ginv = invert(&g.to_dense())?;
    let mut scalar = T::zero();
    for i in 0..n {
        for j in 0..n {
            scalar = scalar + ginv[(i, j)] * ricci.get(i, j);
        }
    }
    let out = CurvatureAtPoint {
        n,
        g,
        gamma,
        riemann,
        ricci,
        scalar,
    };
    if !out.scalar.is_finite() || out.riemann.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("curvature"));
    }
    Ok(out)
}

/// Curvature from packed metric components carried as second-order jets in
/// the chart coordinates (component `(i, j)`, `i ≤ j`, at the packed index
/// of [`SymMatrix`]).
pub fn curvature_from_jet<T: Real>(n: usize, comps: &[Jet2<T>]) -> Result<CurvatureAtPoint<T>> {
    if comps.len() != n * (n + 1) / 2 {
        return Err(Error::DimensionMismatch {
            expected: n * (n + 1) / 2,
            found: comps.len(),
        });
    }
    let idx = |i: usize, j: usize| packed_index(n, i, j);
    let gv = |i: usize, j: usize| comps[idx(i, j)].value;
    let dg = |k: usize, i: usize, j: usize| comps[idx(i, j)].d(k);
    let ddg = |k: usize, l: usize, i: usize, j: usize| comps[idx(i, j)].dd(k, l);

    let g = SymMatrix::from_fn(n, gv);
    crate::numerics::cholesky(&g)?;
    let ginv = invert(&g.to_dense())?;

    // First kind Γ_mij and its derivatives.
    let first = |m: usize, i: usize, j: usize| (dg(i, m, j) + dg(j, m, i) - dg(m, i, j)) * T::lit(0.5);
    let dfirst = |l: usize, m: usize, i: usize, j: usize| {
        (ddg(l, i, m, j) + ddg(l, j, m, i) - ddg(l, m, i, j)) * T::lit(0.5)
    };
    // ∂_l g^{km} = −g^{ka} ∂_l g_ab g^{bm}
    let mut dginv = vec![T::zero(); n * n * n];
    for l in 0..n {
        let dgl = Mat::from_fn(n, n, |a, b| dg(l, a, b));
        let prod = ginv.matmul(&dgl).matmul(&ginv);
        for k in 0..n {
            for m in 0..n {
                dginv[(l * n + k) * n + m] = -prod[(k, m)];
            }
        }
    }

    let mut gamma = vec![T::zero(); n * n * n];
    let mut dgamma = vec![T::zero(); n * n * n * n]; // [l][k][i][j]
    for i in 0..n {
        for j in i..n {
            let f: Vec<T> = (0..n).map(|m| first(m, i, j)).collect();
            for k in 0..n {
                let mut s = T::zero();
                for m in 0..n {
                    s = s + ginv[(k, m)] * f[m];
                }
                gamma[(k * n + i) * n + j] = s;
                gamma[(k * n + j) * n + i] = s;
                for l in 0..n {
                    let mut d = T::zero();
                    for m in 0..n {
                        d = d + dginv[(l * n + k) * n + m] * f[m] + ginv[(k, m)] * dfirst(l, m, i, j);
                    }
                    dgamma[((l * n + k) * n + i) * n + j] = d;
                    dgamma[((l * n + k) * n + j) * n + i] = d;
                }
            }
        }
    }
    let gm = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];
    let dgm = |l: usize, k: usize, i: usize, j: usize| dgamma[((l * n + k) * n + i) * n + j];

    let mut up = vec![T::zero(); n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    let mut s = dgm(i, l, j, k) - dgm(j, l, i, k);
                    for m in 0..n {
                        s = s + gm(l, i, m) * gm(m, j, k) - gm(l, j, m) * gm(m, i, k);
                    }
                    up[((l * n + i) * n + j) * n + k] = s;
                }
            }
        }
    }
    assemble(n, g, gamma, up)
}

/// Curvature of a left-invariant style frame with constant structure
/// coefficients `c^k_ij` (`[e_i, e_j] = c^k_ij e_k`, stored at
/// `k n² + i n + j`) and constant frame metric `q`.
pub fn curvature_from_frame<T: Real>(n: usize, c: &[T], q: &SymMatrix<T>) -> Result<CurvatureAtPoint<T>> {
    crate::numerics::cholesky(q)?;
    let qinv = invert(&q.to_dense())?;
    let cc = |k: usize, i: usize, j: usize| c[(k * n + i) * n + j];
    // c_ijk = g([e_i, e_j], e_k)
    let c_low = |i: usize, j: usize, k: usize| {
        let mut s = T::zero();
        for m in 0..n {
            s = s + cc(m, i, j) * q.get(m, k);
        }
        s
    };
    // Koszul with constant metric: Γ_ijk = g(∇_i e_j, e_k)
    let mut gamma = vec![T::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let low: Vec<T> = (0..n)
                .map(|k| (c_low(i, j, k) - c_low(j, k, i) + c_low(k, i, j)) * T::lit(0.5))
                .collect();
            for k in 0..n {
                let mut s = T::zero();
                for m in 0..n {
                    s = s + qinv[(k, m)] * low[m];
                }
                gamma[(k * n + i) * n + j] = s;
            }
        }
    }
    let gm = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];
    let mut up = vec![T::zero(); n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = T::zero();
                    for m in 0..n {
                        s = s + gm(m, j, k) * gm(l, i, m) - gm(m, i, k) * gm(l, j, m) - cc(m, i, j) * gm(l, m, k);
                    }
                    up[((l * n + i) * n + j) * n + k] = s;
                }
            }
        }
    }
    assemble(n, q.clone(), gamma, up)
}

/// Max over `i, j, k` of `|∂_k g_ij − Γ^m_ki g_mj − Γ^m_kj g_im|` from a
/// metric jet and its Christoffel symbols.
pub fn metric_compatibility_residual<T: Real>(n: usize, comps: &[Jet2<T>], curv: &CurvatureAtPoint<T>) -> T {
    let idx = |i: usize, j: usize| packed_index(n, i, j);
    let mut worst = <T as Zero>::zero();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut r = comps[idx(i, j)].d(k);
                for m in 0..n {
                    r = r - curv.christoffel(m, k, i) * curv.g.get(m, j) - curv.christoffel(m, k, j) * curv.g.get(i, m);
                }
                worst = Float::max(worst, r.abs());
            }
        }
    }
    worst
}
