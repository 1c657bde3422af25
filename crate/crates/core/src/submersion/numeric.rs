use num_traits::Zero;

use crate::dsl::{parse, Expr};
use crate::geometry::{ChartManifold, CurvatureAtPoint, MetricSource};
use crate::numerics::{gram_schmidt, packed_index, solve, sym_eigen, Jet2, Mat, Number, SymMatrix};
use crate::{Error, Real, Result};

use super::closed::{ClosedFormSubmersionData, Realization};

/// Singular values of `dπ` below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Step of the central differences used for `∇A`.
pub const NABLA_A_STEP: f64 = 1e-4;

/// A submersion between two charts given by coordinate expressions for the
/// projection. The Jacobian is differentiated symbolically once, so the
/// splitting and the canonical variation carry exact jets.
#[derive(Debug, Clone)]
pub struct NumericSubmersion<T> {
    pub name: String,
    pub total: ChartManifold<T>,
    pub base: ChartManifold<T>,
    projection: Vec<Expr>,
    /// `∂π_a/∂x_i` at `a n + i`.
    jacobian: Vec<Expr>,
}

/// Orthonormal split of the tangent space at a point.
#[derive(Debug, Clone)]
pub struct Splitting<T> {
    pub g: SymMatrix<T>,
    pub horizontal: Vec<Vec<T>>,
    pub vertical: Vec<Vec<T>>,
    /// g-orthogonal projector onto the horizontal space.
    pub proj_h: Mat<T>,
}

impl<T: Real> Splitting<T> {
    /// Horizontal basis followed by the vertical one.
    pub fn frame(&self) -> Vec<Vec<T>> {
        self.horizontal.iter().chain(&self.vertical).cloned().collect()
    }

    /// Largest deviation of the split frame from g-orthonormality.
    pub fn orthonormality_residual(&self) -> T {
        let f = self.frame();
        let mut worst = T::zero();
        for (a, u) in f.iter().enumerate() {
            for (b, v) in f.iter().enumerate() {
                let want = if a == b { T::one() } else { T::zero() };
                worst = worst.max((self.g.bilinear(u, v) - want).abs());
            }
        }
        worst
    }
}

/// `(P_H, Jᵀ(J G⁻¹ Jᵀ)⁻¹ J)` for a metric `g` and a `k × n` Jacobian.
/// The second matrix is `g P_H`, the horizontal part of the metric.
fn projector<N: Number>(g: &Mat<N>, j: &Mat<N>) -> Result<(Mat<N>, Mat<N>)> {
    let ginv_jt = solve(g, &j.transpose())?;
    let m = j.matmul(&ginv_jt);
    let x = solve(&m, j)?;
    Ok((ginv_jt.matmul(&x), j.transpose().matmul(&x)))
}

impl<T: Real> NumericSubmersion<T> {
    pub fn new(name: impl Into<String>, total: ChartManifold<T>, base: ChartManifold<T>, projection: Vec<Expr>) -> Result<Self> {
        let (n, k) = (total.dim(), base.dim());
        if projection.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: projection.len(),
            });
        }
        if k > n {
            return Err(Error::InvalidSpec(format!("base dimension {k} exceeds total dimension {n}")));
        }
        if let Some(bad) = projection.iter().find(|e| e.arity() > n) {
            return Err(Error::InvalidSpec(format!("projection component {bad} uses more than {n} variables")));
        }
        let jacobian = projection.iter().flat_map(|e| e.gradient(n)).collect();
        Ok(Self {
            name: name.into(),
            total,
            base,
            projection,
            jacobian,
        })
    }

    pub fn from_strings(
        name: impl Into<String>,
        total: ChartManifold<T>,
        base: ChartManifold<T>,
        vars: &[&str],
        comps: &[&str],
    ) -> Result<Self> {
        let proj = comps.iter().map(|c| parse(c, vars)).collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(name, total, base, proj)
    }

    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.dim() - self.base_dim()
    }

    pub fn projection(&self) -> &[Expr] {
        &self.projection
    }

    pub fn project(&self, p: &[T]) -> Result<Vec<T>> {
        self.total.check_domain(p)?;
        let q: Vec<T> = self.projection.iter().map(|e| e.eval(p)).collect::<std::result::Result<_, _>>()?;
        self.base.check_domain(&q)?;
        Ok(q)
    }

    pub fn jacobian(&self, p: &[T]) -> Result<Mat<T>> {
        let n = self.dim();
        let vals: Vec<T> = self.jacobian.iter().map(|e| e.eval(p)).collect::<std::result::Result<_, _>>()?;
        Ok(Mat::from_fn(self.base_dim(), n, |a, i| vals[a * n + i]))
    }

    fn jacobian_jet(&self, p: &[T]) -> Result<Mat<Jet2<T>>> {
        let n = self.dim();
        let vars = Jet2::variables(p);
        let vals: Vec<Jet2<T>> = self
            .jacobian
            .iter()
            .map(|e| e.eval_with(&vars))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Mat::from_fn(self.base_dim(), n, |a, i| vals[a * n + i].clone()))
    }

    fn metric_jet_dense(&self, p: &[T]) -> Result<Mat<Jet2<T>>> {
        let n = self.dim();
        let g = self.total.metric_jet(p)?;
        Ok(Mat::from_fn(n, n, |i, j| g[packed_index(n, i, j)].clone()))
    }

    fn check_rank(&self, j: &Mat<T>) -> Result<()> {
        let k = self.base_dim();
        let jjt = SymMatrix::from_dense(&j.matmul(&j.transpose()));
        let (ev, _) = sym_eigen(&jjt);
        let thr = T::lit(RANK_THRESHOLD);
        let rank = ev.iter().filter(|&&l| l.max(T::zero()).sqrt() > thr).count();
        if rank < k {
            return Err(Error::RankDeficient { rank, expected: k });
        }
        Ok(())
    }

    /// Horizontal/vertical split at `p`, both g-orthonormal.
    pub fn splitting(&self, p: &[T]) -> Result<Splitting<T>> {
        let (n, k) = (self.dim(), self.base_dim());
        let g = self.total.metric(p)?;
        let j = self.jacobian(p)?;
        self.check_rank(&j)?;
        let gd = g.to_dense();
        let (ph, _) = projector(&gd, &j)?;
        let ginv_jt = solve(&gd, &j.transpose())?;
        let drop = T::lit(1e-6);
        let hc: Vec<Vec<T>> = (0..k).map(|a| ginv_jt.column(a)).collect();
        let horizontal = gram_schmidt(&g, &hc, k, drop);
        // (I − P_H) e_i, largest relative to |e_i| first; near-null ones are
        // pure roundoff and must not seed a direction.
        let mut vc: Vec<(T, Vec<T>)> = (0..n)
            .map(|i| {
                let c: Vec<T> = (0..n).map(|r| if r == i { T::one() } else { T::zero() } - ph[(r, i)]).collect();
                (g.quad(&c).sqrt() / g.get(i, i).sqrt(), c)
            })
            .filter(|(r, _)| *r > drop)
            .collect();
        vc.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let vc: Vec<Vec<T>> = vc.into_iter().map(|(_, c)| c).collect();
        let vertical = gram_schmidt(&g, &vc, n - k, drop);
        if horizontal.len() != k || vertical.len() != n - k {
            return Err(Error::RankDeficient {
                rank: horizontal.len(),
                expected: k,
            });
        }
        Ok(Splitting {
            g,
            horizontal,
            vertical,
            proj_h: ph,
        })
    }

    pub fn vertical_basis(&self, p: &[T]) -> Result<Vec<Vec<T>>> {
        Ok(self.splitting(p)?.vertical)
    }

    pub fn horizontal_basis(&self, p: &[T]) -> Result<Vec<Vec<T>>> {
        Ok(self.splitting(p)?.horizontal)
    }

    /// Packed jets of `e^{2t} g + (1 − e^{2t}) g_H` at `p`.
    pub fn canonical_metric_jet(&self, t: T, p: &[T]) -> Result<Vec<Jet2<T>>> {
        let n = self.dim();
        self.check_rank(&self.jacobian(p)?)?;
        let g = self.metric_jet_dense(p)?;
        let j = self.jacobian_jet(p)?;
        let (_, gh) = projector(&g, &j)?;
        let e = (t + t).exp();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in a..n {
                out.push(g[(a, b)].scale(e) + gh[(a, b)].scale(T::one() - e));
            }
        }
        Ok(out)
    }

    pub fn canonical_metric(&self, t: T, p: &[T]) -> Result<SymMatrix<T>> {
        let n = self.dim();
        let jet = self.canonical_metric_jet(t, p)?;
        Ok(SymMatrix::from_fn(n, |a, b| jet[packed_index(n, a, b)].value))
    }

    /// Chart carrying the canonical variation at `t` on the total box.
    pub fn canonical_chart(&self, t: T) -> Result<ChartManifold<T>> {
        let me = self.clone();
        let source = MetricSource::Jet(std::sync::Arc::new(move |p: &[T]| me.canonical_metric_jet(t, p)));
        let mut c = ChartManifold::new(
            format!("{} (t = {})", self.name, t),
            self.total.lo.clone(),
            self.total.hi.clone(),
            source,
        )?;
        c.margin = self.total.margin;
        Ok(c)
    }

    /// `P_H` and its first partials at `p`: entry `(r, c)` of `∂_l P_H` at
    /// `(l n + r) n + c`.
    fn projector_with_derivs(&self, p: &[T]) -> Result<(Mat<T>, Vec<T>)> {
        let n = self.dim();
        let g = self.metric_jet_dense(p)?;
        let j = self.jacobian_jet(p)?;
        let (ph, _) = projector(&g, &j)?;
        let mut d = vec![T::zero(); n * n * n];
        for l in 0..n {
            for r in 0..n {
                for c in 0..n {
                    d[(l * n + r) * n + c] = ph[(r, c)].d(l);
                }
            }
        }
        Ok((ph.map(|x| x.value), d))
    }

    /// Components `A^k_ij` of the O'Neill tensor `A_E F = V∇_{HE}HF + H∇_{HE}VF`
    /// in chart coordinates, stored at `(k n + i) n + j`.
    pub fn a_components(&self, p: &[T]) -> Result<Vec<T>> {
        self.check_rank(&self.jacobian(p)?)?;
        let n = self.dim();
        let curv = self.total.curvature(p)?;
        let (ph, dph) = self.projector_with_derivs(p)?;
        let pv = Mat::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() } - ph[(r, c)]);
        let mut out = vec![T::zero(); n * n * n];
        for i in 0..n {
            let x = ph.column(i);
            // (∂_X P_H) as a matrix
            let dx = Mat::from_fn(n, n, |r, c| (0..n).fold(T::zero(), |s, l| s + x[l] * dph[(l * n + r) * n + c]));
            for j in 0..n {
                let hj = ph.column(j);
                let vj = pv.column(j);
                let dxej = dx.column(j);
                let gam_h = christoffel_apply(&curv, &x, &hj);
                let gam_v = christoffel_apply(&curv, &x, &vj);
                let first: Vec<T> = (0..n).map(|r| dxej[r] + gam_h[r]).collect();
                let second: Vec<T> = (0..n).map(|r| gam_v[r] - dxej[r]).collect();
                let a = pv.matvec(&first);
                let b = ph.matvec(&second);
                for k in 0..n {
                    out[(k * n + i) * n + j] = a[k] + b[k];
                }
            }
        }
        Ok(out)
    }

    /// `A_X Y` for horizontal `X`, `Y` (chart components).
    pub fn a_tensor(&self, p: &[T], x: &[T], y: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        let a = self.a_components(p)?;
        Ok(contract3(&a, n, x, y))
    }

    /// `|T|` over a g-orthonormal vertical frame at `p`, where
    /// `T_U W = H∇_U W` for vertical `U`, `W`.
    pub fn t_norm(&self, p: &[T]) -> Result<T> {
        let n = self.dim();
        let split = self.splitting(p)?;
        let curv = self.total.curvature(p)?;
        let (ph, dph) = self.projector_with_derivs(p)?;
        let mut s = T::zero();
        for u in &split.vertical {
            let du = Mat::from_fn(n, n, |r, c| (0..n).fold(T::zero(), |acc, l| acc + u[l] * dph[(l * n + r) * n + c]));
            for w in &split.vertical {
                let dw = du.matvec(w);
                let gam = christoffel_apply(&curv, u, w);
                let v: Vec<T> = (0..n).map(|r| gam[r] - dw[r]).collect();
                let h = ph.matvec(&v);
                s = s + split.g.quad(&h);
            }
        }
        Ok(s.sqrt())
    }

    /// `(∇_l A)^k_ij` at `((l n + k) n + i) n + j`; the partials of the
    /// components come from central differences with step [`NABLA_A_STEP`].
    pub fn nabla_a_components(&self, p: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        let a0 = self.a_components(p)?;
        let curv = self.total.curvature(p)?;
        let h = T::lit(NABLA_A_STEP);
        let mut out = vec![T::zero(); n * n * n * n];
        for l in 0..n {
            let mut pp = p.to_vec();
            let mut pm = p.to_vec();
            pp[l] = pp[l] + h;
            pm[l] = pm[l] - h;
            let ap = self.a_components(&pp)?;
            let am = self.a_components(&pm)?;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let at = |k: usize, i: usize, j: usize| a0[(k * n + i) * n + j];
                        let mut s = (ap[(k * n + i) * n + j] - am[(k * n + i) * n + j]) / (h + h);
                        for m in 0..n {
                            s = s + curv.christoffel(k, l, m) * at(m, i, j)
                                - curv.christoffel(m, l, i) * at(k, m, j)
                                - curv.christoffel(m, l, j) * at(k, i, m);
                        }
                        out[((l * n + k) * n + i) * n + j] = s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Everything the curvature formulas need at `p`, expressed in the
    /// g-orthonormal split frame (horizontal vectors first).
    pub fn point_data(&self, p: &[T]) -> Result<ClosedFormSubmersionData<T>> {
        let (n, k) = (self.dim(), self.base_dim());
        let f = n - k;
        let split = self.splitting(p)?;
        let frame = split.frame();
        let curv = self.total.curvature(p)?;
        let r_total = change_basis4(&curv, &frame);
        let q = self.project(p)?;
        let bcurv = self.base.curvature(&q)?;
        let j = self.jacobian(p)?;
        let pushed: Vec<Vec<T>> = split.horizontal.iter().map(|h| j.matvec(h)).collect();
        let r_base = change_basis4(&bcurv, &pushed);
        let acomp = self.a_components(p)?;
        let nacomp = self.nabla_a_components(p)?;
        let g = &split.g;
        let mut a = vec![T::zero(); f * k * k];
        for (v, vv) in split.vertical.iter().enumerate() {
            for (i, hi) in split.horizontal.iter().enumerate() {
                for (jj, hj) in split.horizontal.iter().enumerate() {
                    a[(v * k + i) * k + jj] = g.bilinear(&contract3(&acomp, n, hi, hj), vv);
                }
            }
        }
        let mut nabla_a = vec![T::zero(); k * k * k * f];
        for (l, hl) in split.horizontal.iter().enumerate() {
            // (∇_{h_l} A) as a (1,2) tensor
            let mut dl = vec![T::zero(); n * n * n];
            for (idx, slot) in dl.iter_mut().enumerate() {
                *slot = (0..n).fold(T::zero(), |s, m| s + hl[m] * nacomp[m * n * n * n + idx]);
            }
            for (i, hi) in split.horizontal.iter().enumerate() {
                for (jj, hj) in split.horizontal.iter().enumerate() {
                    let w = contract3(&dl, n, hi, hj);
                    for (v, vv) in split.vertical.iter().enumerate() {
                        nabla_a[((l * k + i) * k + jj) * f + v] = g.bilinear(&w, vv);
                    }
                }
            }
        }
        let t_norm = self.t_norm(p)?;
        let data = ClosedFormSubmersionData::new(self.name.clone(), k, f, r_total, r_base, a, nabla_a)?;
        Ok(data.with_t_norm(t_norm).with_realization(Realization::Chart {
            submersion: Box::new(self.clone()),
            point: p.to_vec(),
            frame,
        }))
    }
}

/// `Γ(X, Y)^k = Γ^k_ij X^i Y^j`.
fn christoffel_apply<T: Real>(c: &CurvatureAtPoint<T>, x: &[T], y: &[T]) -> Vec<T> {
    let n = c.dim();
    (0..n)
        .map(|k| {
            let mut s = T::zero();
            for i in 0..n {
                for j in 0..n {
                    s = s + c.christoffel(k, i, j) * x[i] * y[j];
                }
            }
            s
        })
        .collect()
}

/// `B^k_ij X^i Y^j` for a (1,2) tensor stored at `(k n + i) n + j`.
fn contract3<T: Real>(b: &[T], n: usize, x: &[T], y: &[T]) -> Vec<T> {
    (0..n)
        .map(|k| {
            let mut s = T::zero();
            for i in 0..n {
                for j in 0..n {
                    s = s + b[(k * n + i) * n + j] * x[i] * y[j];
                }
            }
            s
        })
        .collect()
}

/// `R(E_a, E_b, E_c, E_d)` for the vectors `frame` (stored like
/// [`CurvatureAtPoint::riemann`] with dimension `frame.len()`).
pub fn change_basis4<T: Real>(c: &CurvatureAtPoint<T>, frame: &[Vec<T>]) -> Vec<T> {
    let n = c.dim();
    let m = frame.len();
    let mut cur = c.riemann.clone();
    let mut dims = [n, n, n, n];
    for slot in 0..4 {
        let mut sizes = dims;
        sizes[slot] = m;
        let total: usize = sizes.iter().product();
        let mut next = vec![<T as Zero>::zero(); total];
        let stride_old: usize = dims[slot + 1..].iter().product();
        let stride_new: usize = sizes[slot + 1..].iter().product();
        let outer: usize = dims[..slot].iter().product();
        for o in 0..outer {
            for a in 0..m {
                for r in 0..stride_new {
                    let mut s = T::zero();
                    for i in 0..n {
                        let e = frame[a][i];
                        if e != T::zero() {
                            s = s + e * cur[(o * n + i) * stride_old + r];
                        }
                    }
                    next[(o * m + a) * stride_new + r] = s;
                }
            }
        }
        cur = next;
        dims = sizes;
    }
    cur
}
