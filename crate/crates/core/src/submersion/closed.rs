use crate::geometry::{CurvatureAtPoint, FrameManifold};
use crate::numerics::SymMatrix;
use crate::{Error, Real, Result};

use super::numeric::{change_basis4, NumericSubmersion};

/// Where closed-form data comes from, so the generic engine can be run on
/// the same geometry for cross-checks.
#[derive(Debug, Clone)]
pub enum Realization<T> {
    /// Left-invariant frame; `frame` holds the split frame vectors in frame
    /// components (horizontal first).
    Frame { manifold: FrameManifold<T>, frame: Vec<Vec<T>> },
    /// A point of a numeric submersion; `frame` in chart components.
    Chart {
        submersion: Box<NumericSubmersion<T>>,
        point: Vec<T>,
        frame: Vec<Vec<T>>,
    },
}

impl<T: Real> Realization<T> {
    pub fn frame(&self) -> &[Vec<T>] {
        match self {
            Realization::Frame { frame, .. } | Realization::Chart { frame, .. } => frame,
        }
    }

    /// Curvature of the canonical variation at `t`, in the underlying basis.
    pub fn direct_curvature(&self, t: T, k: usize) -> Result<CurvatureAtPoint<T>> {
        match self {
            Realization::Frame { manifold, frame } => {
                let q = frame_canonical_metric(&manifold.q, &frame[..k], t);
                manifold.with_metric(q)?.curvature()
            }
            Realization::Chart { submersion, point, .. } => submersion.canonical_chart(t)?.curvature(point),
        }
    }

    /// Split-frame coordinates to underlying components.
    pub fn embed(&self, z: &[T]) -> Vec<T> {
        let fr = self.frame();
        let n = fr[0].len();
        (0..n)
            .map(|i| z.iter().zip(fr).fold(T::zero(), |s, (c, e)| s + *c * e[i]))
            .collect()
    }
}

/// `e^{2t} q + (1 − e^{2t}) Σ_h (q h)(q h)ᵀ` for q-orthonormal horizontal `h`.
pub fn frame_canonical_metric<T: Real>(q: &SymMatrix<T>, horizontal: &[Vec<T>], t: T) -> SymMatrix<T> {
    let e = (t + t).exp();
    let qh: Vec<Vec<T>> = horizontal.iter().map(|h| q.matvec(h)).collect();
    SymMatrix::from_fn(q.dim(), |a, b| {
        let hh = qh.iter().fold(T::zero(), |s, v| s + v[a] * v[b]);
        e * q.get(a, b) + (T::one() - e) * hh
    })
}

/// Curvature data of a submersion with totally geodesic fibers at one point,
/// in a g-orthonormal split frame `h_1 … h_k, v_1 … v_f`. Horizontal inputs
/// are coordinate vectors of length `k`, vertical ones of length `f`.
///
/// * `r_total[((a n + b) n + c) n + d] = R(E_a, E_b, E_c, E_d)` for the
///   total space (`n = k + f`).
/// * `r_base` likewise for the base on `π_* h_i`.
/// * `a[(v k + i) k + j] = g(A_{h_i} h_j, v_v)`.
/// * `nabla_a[((l k + i) k + j) f + v] = g((∇_{h_l} A)_{h_i} h_j, v_v)`.
#[derive(Debug, Clone)]
pub struct ClosedFormSubmersionData<T> {
    pub name: String,
    k: usize,
    f: usize,
    r_total: Vec<T>,
    r_base: Vec<T>,
    a: Vec<T>,
    nabla_a: Vec<T>,
    /// Norm of the second fundamental form of the fibers (0 for exact data).
    pub t_norm: T,
    pub realization: Option<Realization<T>>,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl<T: Real> ClosedFormSubmersionData<T> {
    pub fn new(
        name: impl Into<String>,
        k: usize,
        f: usize,
        r_total: Vec<T>,
        r_base: Vec<T>,
        a: Vec<T>,
        nabla_a: Vec<T>,
    ) -> Result<Self> {
        let n = k + f;
        check_len(n.pow(4), r_total.len())?;
        check_len(k.pow(4), r_base.len())?;
        check_len(f * k * k, a.len())?;
        check_len(k * k * k * f, nabla_a.len())?;
        Ok(Self {
            name: name.into(),
            k,
            f,
            r_total,
            r_base,
            a,
            nabla_a,
            t_norm: T::zero(),
            realization: None,
        })
    }

    pub fn with_t_norm(mut self, t: T) -> Self {
        self.t_norm = t;
        self
    }

    pub fn with_realization(mut self, r: Realization<T>) -> Self {
        self.realization = Some(r);
        self
    }

    pub fn horizontal_dim(&self) -> usize {
        self.k
    }

    pub fn vertical_dim(&self) -> usize {
        self.f
    }

    pub fn dim(&self) -> usize {
        self.k + self.f
    }

    /// Split-frame vector with horizontal part `x` and vertical part `v`.
    pub fn join(&self, x: &[T], v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        out[..self.k].copy_from_slice(x);
        out[self.k..].copy_from_slice(v);
        out
    }

    fn hor(&self, x: &[T]) -> Vec<T> {
        self.join(x, &vec![T::zero(); self.f])
    }

    fn ver(&self, v: &[T]) -> Vec<T> {
        self.join(&vec![T::zero(); self.k], v)
    }

    /// `R(X, Y, Z, W)` of the total space on split-frame vectors.
    pub fn total_riemann(&self, x: &[T], y: &[T], z: &[T], w: &[T]) -> T {
        form4(&self.r_total, self.dim(), x, y, z, w)
    }

    /// `K(X, Y)` for horizontal `X`, `Y`.
    pub fn k_total(&self, x: &[T], y: &[T]) -> T {
        let (x, y) = (self.hor(x), self.hor(y));
        self.total_riemann(&x, &y, &y, &x)
    }

    /// `K_B(π_* X, π_* Y)`.
    pub fn k_base(&self, x: &[T], y: &[T]) -> T {
        form4(&self.r_base, self.k, x, y, y, x)
    }

    /// `K(V, W)` for vertical `V`, `W`.
    pub fn k_vertical(&self, v: &[T], w: &[T]) -> T {
        let (v, w) = (self.ver(v), self.ver(w));
        self.total_riemann(&v, &w, &w, &v)
    }

    fn unit(n: usize, i: usize) -> Vec<T> {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        e
    }

    pub fn ric_b(&self, x: &[T]) -> T {
        (0..self.k).map(|i| self.k_base(x, &Self::unit(self.k, i))).sum()
    }

    /// `Σ_i K(X, e_i)` over the horizontal frame.
    pub fn ric_h(&self, x: &[T]) -> T {
        (0..self.k).map(|i| self.k_total(x, &Self::unit(self.k, i))).sum()
    }

    /// Ricci of the fiber (equal to `Σ_j K(V, e_j)` over the vertical frame
    /// because the fibers are totally geodesic).
    pub fn ric_f(&self, v: &[T]) -> T {
        (0..self.f).map(|j| self.k_vertical(v, &Self::unit(self.f, j))).sum()
    }

    /// `A_X Y` (vertical components).
    pub fn a_map(&self, x: &[T], y: &[T]) -> Vec<T> {
        let k = self.k;
        (0..self.f)
            .map(|v| {
                let mut s = T::zero();
                for i in 0..k {
                    for j in 0..k {
                        s = s + self.a[(v * k + i) * k + j] * x[i] * y[j];
                    }
                }
                s
            })
            .collect()
    }

    /// `A*_X V`, defined by `g(A*_X V, Y) = g(A_X Y, V)`.
    pub fn a_star(&self, x: &[T], v: &[T]) -> Vec<T> {
        let k = self.k;
        (0..k)
            .map(|j| {
                let mut s = T::zero();
                for (vi, &vv) in v.iter().enumerate() {
                    for i in 0..k {
                        s = s + self.a[(vi * k + i) * k + j] * x[i] * vv;
                    }
                }
                s
            })
            .collect()
    }

    /// `(∇_Z A)_X Y` (vertical components).
    pub fn nabla_a(&self, z: &[T], x: &[T], y: &[T]) -> Vec<T> {
        let (k, f) = (self.k, self.f);
        (0..f)
            .map(|v| {
                let mut s = T::zero();
                for l in 0..k {
                    for i in 0..k {
                        for j in 0..k {
                            s = s + self.nabla_a[((l * k + i) * k + j) * f + v] * z[l] * x[i] * y[j];
                        }
                    }
                }
                s
            })
            .collect()
    }

    /// `Σ_i g((∇_{e_i} A)_X e_i, V)`.
    pub fn nabla_a_sum(&self, x: &[T], v: &[T]) -> T {
        (0..self.k)
            .map(|i| {
                let e = Self::unit(self.k, i);
                dot(&self.nabla_a(&e, x, &e), v)
            })
            .sum()
    }

    /// Largest `|g(A_X Y, V) − g(A*_X V, Y)|` and `|A_X Y + A_Y X|` over the
    /// given triples.
    pub fn structure_residuals(&self, triples: &[(Vec<T>, Vec<T>, Vec<T>)]) -> (T, T) {
        let mut adj = T::zero();
        let mut alt = T::zero();
        for (x, y, v) in triples {
            adj = adj.max((dot(&self.a_map(x, y), v) - dot(&self.a_star(x, v), y)).abs());
            let s: Vec<T> = self.a_map(x, y).iter().zip(self.a_map(y, x)).map(|(p, q)| *p + q).collect();
            alt = alt.max(norm(&s));
        }
        (adj, alt)
    }

    /// Fails with `NotTotallyGeodesic` when the recorded fiber second
    /// fundamental form exceeds [`super::TOTALLY_GEODESIC_TOL`].
    pub fn require_totally_geodesic(&self) -> Result<()> {
        if self.t_norm > T::lit(super::TOTALLY_GEODESIC_TOL) {
            return Err(Error::NotTotallyGeodesic {
                norm: self.t_norm.as_f64(),
            });
        }
        Ok(())
    }

    /// Curvature tensor of the canonical variation at `t` from the generic
    /// engine, in the split frame.
    pub fn direct_split_riemann(&self, t: T) -> Result<Vec<T>> {
        let r = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec(format!("{} has no realization for the engine", self.name)))?;
        let c = r.direct_curvature(t, self.k)?;
        Ok(change_basis4(&c, r.frame()))
    }

    /// Ricci form of the canonical variation at `t` from the generic engine,
    /// on split-frame vectors.
    pub fn direct_ricci(&self, t: T, z: &[T]) -> Result<T> {
        let r = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec(format!("{} has no realization for the engine", self.name)))?;
        let c = r.direct_curvature(t, self.k)?;
        let u = r.embed(z);
        Ok(c.ricci_form(&u, &u))
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub(crate) fn form4<T: Real>(r: &[T], n: usize, x: &[T], y: &[T], z: &[T], w: &[T]) -> T {
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
                    s = s + r[((i * n + j) * n + k) * n + l] * xyz * w[l];
                }
            }
        }
    }
    s
}
