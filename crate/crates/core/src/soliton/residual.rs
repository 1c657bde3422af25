use rayon::prelude::*;

use crate::dsl::Expr;
use crate::geometry::{ChartManifold, GridSpec};
use crate::numerics::{invert, packed_index, Jet2, Mat, SymMatrix};
use crate::{Error, Real, Result};

/// Sign class of `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonKind {
    Steady,
    Expanding,
    Shrinking,
}

pub fn classify<T: Real>(rho: T) -> SolitonKind {
    if rho > T::zero() {
        SolitonKind::Shrinking
    } else if rho < T::zero() {
        SolitonKind::Expanding
    } else {
        SolitonKind::Steady
    }
}

/// The vector field of `Ric + ½ L_X g = ρ g`.
#[derive(Debug, Clone, PartialEq)]
pub enum SolitonField {
    /// Chart components `X^k`.
    Vector(Vec<Expr>),
    /// `X = grad f`; the equation becomes `Ric + Hess f = ρ g`.
    Potential(Expr),
}

#[derive(Debug, Clone)]
pub struct SolitonData<T> {
    pub manifold: ChartManifold<T>,
    pub field: SolitonField,
    pub rho: T,
}

impl<T: Real> SolitonData<T> {
    pub fn new(manifold: ChartManifold<T>, field: SolitonField, rho: T) -> Result<Self> {
        let n = manifold.dim();
        match &field {
            SolitonField::Vector(xs) => {
                if xs.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: xs.len(),
                    });
                }
                if let Some(e) = xs.iter().find(|e| e.arity() > n) {
                    return Err(Error::InvalidSpec(format!("vector field component {e} uses more than {n} variables")));
                }
            }
            SolitonField::Potential(f) => {
                if f.arity() > n {
                    return Err(Error::InvalidSpec(format!("potential {f} uses more than {n} variables")));
                }
            }
        }
        Ok(Self { manifold, field, rho })
    }

    pub fn kind(&self) -> SolitonKind {
        classify(self.rho)
    }
}

fn metric_parts<T: Real>(m: &ChartManifold<T>, p: &[T]) -> Result<(Mat<T>, Vec<Mat<T>>)> {
    let n = m.dim();
    let jets = m.metric_jet(p)?;
    let g = Mat::from_fn(n, n, |i, j| jets[packed_index(n, i, j)].value);
    let dg = (0..n)
        .map(|k| Mat::from_fn(n, n, |i, j| jets[packed_index(n, i, j)].d(k)))
        .collect();
    Ok((g, dg))
}

/// `(L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k`.
fn lie_from_parts<T: Real>(g: &Mat<T>, dg: &[Mat<T>], x: &[T], dx: &Mat<T>) -> SymMatrix<T> {
    let n = x.len();
    SymMatrix::from_fn(n, |i, j| {
        let mut s = T::zero();
        for k in 0..n {
            s = s + x[k] * dg[k][(i, j)] + g[(k, j)] * dx[(k, i)] + g[(i, k)] * dx[(k, j)];
        }
        s
    })
}

/// `L_X g` at `p` from coordinate derivatives of `g` and `X`.
pub fn lie_derivative_metric<T: Real>(m: &ChartManifold<T>, x: &[Expr], p: &[T]) -> Result<SymMatrix<T>> {
    let n = m.dim();
    let (g, dg) = metric_parts(m, p)?;
    let vars = Jet2::variables(p);
    let jets = x.iter().map(|e| e.eval_with(&vars)).collect::<std::result::Result<Vec<_>, _>>()?;
    let vals: Vec<T> = jets.iter().map(|j| j.value).collect();
    // dx[(k, i)] = ∂_i X^k
    let dx = Mat::from_fn(n, n, |k, i| jets[k].d(i));
    Ok(lie_from_parts(&g, &dg, &vals, &dx))
}

/// `L_{grad f} g` at `p`, with `X^k = g^{kl} ∂_l f` differentiated through
/// `∂_i g^{-1} = −g^{-1} (∂_i g) g^{-1}`.
pub fn lie_derivative_gradient<T: Real>(m: &ChartManifold<T>, f: &Expr, p: &[T]) -> Result<SymMatrix<T>> {
    let n = m.dim();
    let (g, dg) = metric_parts(m, p)?;
    let gi = invert(&g)?;
    let fj = f.eval_with(&Jet2::variables(p))?;
    let df: Vec<T> = (0..n).map(|l| fj.d(l)).collect();
    let x = gi.matvec(&df);
    let dx = Mat::from_fn(n, n, |k, i| {
        let dgi_df = gi.matvec(&dg[i].matvec(&x));
        let mut s = -dgi_df[k];
        for l in 0..n {
            s = s + gi[(k, l)] * fj.dd(i, l);
        }
        s
    });
    Ok(lie_from_parts(&g, &dg, &x, &dx))
}

/// `(Hess f)_ij = ∂_i∂_j f − Γ^k_ij ∂_k f`.
pub fn hessian<T: Real>(m: &ChartManifold<T>, f: &Expr, p: &[T]) -> Result<SymMatrix<T>> {
    let n = m.dim();
    let c = m.curvature(p)?;
    let fj = f.eval_with(&Jet2::variables(p))?;
    Ok(SymMatrix::from_fn(n, |i, j| {
        let mut s = fj.dd(i, j);
        for k in 0..n {
            s = s - c.christoffel(k, i, j) * fj.d(k);
        }
        s
    }))
}

/// `|E|` with `E = Ric + ½ L_X g − ρ g` (or `Ric + Hess f − ρ g`), the
/// Frobenius norm in a g-orthonormal frame: `√tr(g⁻¹ E g⁻¹ E)`.
pub fn residual_at<T: Real>(s: &SolitonData<T>, p: &[T]) -> Result<T> {
    let m = &s.manifold;
    let n = m.dim();
    let c = m.curvature(p)?;
    let extra = match &s.field {
        SolitonField::Vector(x) => {
            let l = lie_derivative_metric(m, x, p)?;
            SymMatrix::from_fn(n, |i, j| l.get(i, j) * T::lit(0.5))
        }
        SolitonField::Potential(f) => hessian(m, f, p)?,
    };
    let e = Mat::from_fn(n, n, |i, j| c.ricci.get(i, j) + extra.get(i, j) - s.rho * c.g.get(i, j));
    let gi = invert(&c.g.to_dense())?;
    let a = gi.matmul(&e);
    let mut t = T::zero();
    for i in 0..n {
        for j in 0..n {
            t = t + a[(i, j)] * a[(j, i)];
        }
    }
    Ok(t.max(T::zero()).sqrt())
}

/// Largest [`residual_at`] over the grid, with the worst point.
pub fn soliton_residual<T: Real>(s: &SolitonData<T>, grid: &GridSpec) -> Result<(T, Vec<T>)> {
    let (lo, hi) = s.manifold.inner_box();
    let pts = grid.points(&lo, &hi);
    let vals = pts.par_iter().map(|p| residual_at(s, p)).collect::<Result<Vec<T>>>()?;
    let mut best = (T::neg_infinity(), Vec::new());
    for (v, p) in vals.into_iter().zip(pts) {
        if v > best.0 || v.is_nan() {
            best = (v, p);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::round_sphere;
    use crate::dsl::parse;

    fn flat(n: usize) -> ChartManifold<f64> {
        let comps: Vec<String> = (0..n)
            .flat_map(|i| (i..n).map(move |j| if i == j { "1" } else { "0" }.to_string()))
            .collect();
        let refs: Vec<&str> = comps.iter().map(|s| s.as_str()).collect();
        let names = ["x", "y", "z"];
        ChartManifold::from_strings("flat", &names[..n], vec![-1.0; n], vec![1.0; n], &refs).unwrap()
    }

    #[test]
    fn zero_field() {
        let m = round_sphere::<f64>(2, 1.0).unwrap();
        let l = lie_derivative_metric(&m, &[Expr::num(0.0), Expr::num(0.0)], &[1.0, 2.0]).unwrap();
        assert!(l.to_dense().map(|v| v.abs()).column(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn quadratic_potential() {
        let m = flat(3);
        let f = parse("(x^2 + y^2 + z^2)/2", &["x", "y", "z"]).unwrap();
        let h = hessian(&m, &f, &[0.1, -0.4, 0.3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((h.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gradient_routes_agree_on_sphere() {
        let m = round_sphere::<f64>(2, 1.0).unwrap();
        let f = parse("sin(x)*cos(2*y) + x^2*y/3", &["x", "y"]).unwrap();
        for p in [[0.7, 1.0], [1.5, 4.0], [2.2, 0.3]] {
            let l = lie_derivative_gradient(&m, &f, &p).unwrap();
            let h = hessian(&m, &f, &p).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((l.get(i, j) - 2.0 * h.get(i, j)).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn einstein_and_wrong_rho() {
        for n in [2, 3] {
            let m = round_sphere::<f64>(n, 1.0).unwrap();
            let zero = vec![Expr::num(0.0); n];
            let rho = (n - 1) as f64;
            let s = SolitonData::new(m.clone(), SolitonField::Vector(zero.clone()), rho).unwrap();
            assert!(soliton_residual(&s, &GridSpec::uniform(3)).unwrap().0 < 1e-8);
            let s = SolitonData::new(m, SolitonField::Vector(zero), rho + 0.5).unwrap();
            let r = soliton_residual(&s, &GridSpec::uniform(3)).unwrap().0;
            assert!((r - 0.5 * (n as f64).sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn gaussian_shrinker() {
        for rho in [0.5, 2.0] {
            let f = parse(&format!("{rho}*(x^2 + y^2)/2"), &["x", "y"]).unwrap();
            let s = SolitonData::new(flat(2), SolitonField::Potential(f.clone()), rho).unwrap();
            assert!(soliton_residual(&s, &GridSpec::uniform(4)).unwrap().0 < 1e-8);
            let grad = vec![parse(&format!("{rho}*x"), &["x", "y"]).unwrap(), parse(&format!("{rho}*y"), &["x", "y"]).unwrap()];
            let v = SolitonData::new(flat(2), SolitonField::Vector(grad), rho).unwrap();
            assert!(soliton_residual(&v, &GridSpec::uniform(4)).unwrap().0 < 1e-8);
        }
    }

    #[test]
    fn kinds() {
        assert_eq!(classify(0.0), SolitonKind::Steady);
        assert_eq!(classify(-1.0), SolitonKind::Expanding);
        assert_eq!(classify(2.0), SolitonKind::Shrinking);
    }
}
