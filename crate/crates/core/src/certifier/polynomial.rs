use crate::numerics::{sym_eigen, Mat, SymMatrix};
use crate::submersion::ClosedFormSubmersionData;
use crate::{Real, Result};

/// How the vertical argument of `p(λ)` is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `‖V‖_g̃ = 1`, i.e. `V = e^{−t} v` for a g-unit `v`.
    #[default]
    TildeUnit,
    /// `‖V‖_g = 1`. Keeps the coefficients bounded as `t → −∞`.
    GUnit,
}

/// Factor `s` with `V = s v`, `v` g-unit.
pub fn vertical_scale<T: Real>(t: T, n: Normalization) -> T {
    match n {
        Normalization::TildeUnit => (-t).exp(),
        Normalization::GUnit => T::one(),
    }
}

/// `p(λ) = c0 + 2λ c1 + λ² c2` for one pair `(X, V)`; `x`, `v` are the
/// g-unit directions in the split frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciPolynomial<T> {
    pub c0: T,
    pub c1: T,
    pub c2: T,
    pub t: T,
    pub x: Vec<T>,
    pub v: Vec<T>,
    pub normalization: Normalization,
}

impl<T: Real> RicciPolynomial<T> {
    pub fn eval(&self, lambda: T) -> T {
        self.c0 + (lambda + lambda) * self.c1 + lambda * lambda * self.c2
    }

    /// `4(c1² − c0 c2)`.
    pub fn discriminant(&self) -> T {
        T::lit(4.0) * self.discriminant_quarter()
    }

    pub fn discriminant_quarter(&self) -> T {
        self.c1 * self.c1 - self.c0 * self.c2
    }

    /// The vector `X + λV` in the split frame.
    pub fn argument(&self, lambda: T) -> Vec<T> {
        let s = vertical_scale(self.t, self.normalization) * lambda;
        self.x.iter().copied().chain(self.v.iter().map(|&c| c * s)).collect()
    }
}

/// The `t`-independent pieces of `p(λ)` at one point, as symmetric or
/// bilinear forms on the split frame.
#[derive(Debug, Clone)]
pub struct PolynomialForms<T> {
    /// `Ric_B` on horizontal vectors.
    pub ric_b: SymMatrix<T>,
    /// `Ric^H(X) = Σ_i K(X, e_i)`.
    pub ric_h: SymMatrix<T>,
    /// `Σ_j |A*_X v_j|²`.
    pub a_star_sq: SymMatrix<T>,
    /// `Σ_i g((∇_{e_i} A)_X e_i, V)`, `k × f`.
    pub nabla_a: Mat<T>,
    /// `Σ_i |A*_{e_i} V|²`.
    pub a_sq: SymMatrix<T>,
    /// `Ric_F`; zero for one-dimensional fibers.
    pub ric_f: SymMatrix<T>,
}

fn unit<T: Real>(n: usize, i: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[i] = T::one();
    e
}

fn polarize<T: Real>(n: usize, q: impl Fn(&[T]) -> T) -> SymMatrix<T> {
    let diag: Vec<T> = (0..n).map(|i| q(&unit(n, i))).collect();
    SymMatrix::from_fn(n, |i, j| {
        if i == j {
            diag[i]
        } else {
            let mut e = unit(n, i);
            e[j] = T::one();
            (q(&e) - diag[i] - diag[j]) * T::lit(0.5)
        }
    })
}

fn sq<T: Real>(v: &[T]) -> T {
    v.iter().map(|&c| c * c).sum()
}

impl<T: Real> PolynomialForms<T> {
    pub fn new(d: &ClosedFormSubmersionData<T>) -> Result<Self> {
        d.require_totally_geodesic()?;
        let (k, f) = (d.horizontal_dim(), d.vertical_dim());
        let a_star_sq = polarize(k, |x| (0..f).map(|j| sq(&d.a_star(x, &unit(f, j)))).sum());
        let a_sq = polarize(f, |v| (0..k).map(|i| sq(&d.a_star(&unit(k, i), v))).sum());
        let ric_f = if f > 1 {
            polarize(f, |v| d.ric_f(v))
        } else {
            SymMatrix::zeros(f)
        };
        Ok(Self {
            ric_b: polarize(k, |x| d.ric_b(x)),
            ric_h: polarize(k, |x| d.ric_h(x)),
            a_star_sq,
            nabla_a: Mat::from_fn(k, f, |a, b| d.nabla_a_sum(&unit(k, a), &unit(f, b))),
            a_sq,
            ric_f,
        })
    }

    pub fn horizontal_dim(&self) -> usize {
        self.ric_b.dim()
    }

    pub fn vertical_dim(&self) -> usize {
        self.a_sq.dim()
    }

    /// Coefficients for g-unit directions `x`, `v`:
    /// `c0 = (1 − e^{2t}) Ric_B + e^{2t} Ric^H + e^{2t} Σ_j |A*_X v_j|²`,
    /// `c1 = −e^{2t} s Σ_i g((∇_{e_i}A)_X e_i, v)`,
    /// `c2 = s² (e^{4t} Σ_i |A*_{e_i} v|² + Ric_F(v))`.
    pub fn coefficients(&self, t: T, x: &[T], v: &[T], n: Normalization) -> (T, T, T) {
        let e = (t + t).exp();
        let s = vertical_scale(t, n);
        let c0 = (T::one() - e) * self.ric_b.quad(x) + e * (self.ric_h.quad(x) + self.a_star_sq.quad(x));
        let mut b = T::zero();
        for (a, &xa) in x.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                b = b + xa * self.nabla_a[(a, j)] * vj;
            }
        }
        let c1 = -e * s * b;
        let c2 = s * s * (e * e * self.a_sq.quad(v) + self.ric_f.quad(v));
        (c0, c1, c2)
    }

    pub fn min_ric_b(&self) -> T {
        min_eig(&self.ric_b)
    }

    /// `None` for one-dimensional fibers.
    pub fn min_ric_f(&self) -> Option<T> {
        (self.vertical_dim() > 1).then(|| min_eig(&self.ric_f))
    }
}

fn min_eig<T: Real>(m: &SymMatrix<T>) -> T {
    sym_eigen(m).0.into_iter().fold(T::infinity(), T::min)
}

/// `p(λ)` for the g-unit split-frame directions `x` (horizontal) and `v`
/// (vertical).
pub fn ricci_polynomial<T: Real>(
    d: &ClosedFormSubmersionData<T>,
    t: T,
    x: &[T],
    v: &[T],
    n: Normalization,
) -> Result<RicciPolynomial<T>> {
    let (c0, c1, c2) = PolynomialForms::new(d)?.coefficients(t, x, v, n);
    Ok(RicciPolynomial {
        c0,
        c1,
        c2,
        t,
        x: x.to_vec(),
        v: v.to_vec(),
        normalization: n,
    })
}

/// `4(c1² − c0 c2)` of [`ricci_polynomial`].
pub fn discriminant<T: Real>(d: &ClosedFormSubmersionData<T>, t: T, x: &[T], v: &[T], n: Normalization) -> Result<T> {
    Ok(ricci_polynomial(d, t, x, v, n)?.discriminant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{hopf_s3_s2, hopf_s7_s4};

    #[test]
    fn scale_factors() {
        let t: f64 = -1.5;
        assert_eq!(vertical_scale(t, Normalization::GUnit), 1.0);
        assert!((vertical_scale(t, Normalization::TildeUnit) - (-t).exp()).abs() < 1e-15);
        // a g-unit v scaled by s has g̃-norm e^{t} s = 1
        let s = vertical_scale(t, Normalization::TildeUnit);
        assert!(((t + t).exp() * s * s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hopf_round_point() {
        let d = hopf_s3_s2::<f64>().unwrap().closed;
        let p = ricci_polynomial(&d, 0.0, &[1.0, 0.0], &[1.0], Normalization::TildeUnit).unwrap();
        assert!((p.eval(0.0) - 2.0).abs() < 1e-12);
        assert_eq!(p.c1, 0.0);
        for lambda in [0.1, 1.0, 3.0] {
            let z = p.argument(lambda);
            let direct = d.direct_ricci(0.0, &z).unwrap();
            assert!((p.eval(lambda) - direct).abs() < 1e-8);
        }
    }

    #[test]
    fn matches_engine_off_round() {
        let d = hopf_s7_s4::<f64>().unwrap().closed;
        let x = [0.5, 0.5, -0.5, 0.5];
        let v = [0.6, 0.0, 0.8];
        for n in [Normalization::TildeUnit, Normalization::GUnit] {
            for t in [-0.8, 0.3] {
                let p = ricci_polynomial(&d, t, &x, &v, n).unwrap();
                for lambda in [-1.3, 0.7] {
                    let direct = d.direct_ricci(t, &p.argument(lambda)).unwrap();
                    assert!((p.eval(lambda) - direct).abs() < 1e-8, "{n:?} {t} {lambda}");
                }
            }
        }
    }

    #[test]
    fn discriminant_tends_to_minus_ric_product() {
        let d = hopf_s7_s4::<f64>().unwrap().closed;
        let (x, v) = ([0.0, 0.6, 0.0, 0.8], [1.0, 0.0, 0.0]);
        let limit = d.ric_f(&v) * d.ric_b(&x);
        let gap: Vec<f64> = [-2.0, -4.0, -6.0]
            .into_iter()
            .map(|t| {
                let p = ricci_polynomial(&d, t, &x, &v, Normalization::GUnit).unwrap();
                (p.discriminant_quarter() + limit).abs()
            })
            .collect();
        assert!(gap[1] < 0.1 * gap[0] && gap[2] < 0.1 * gap[1]);
        assert!(gap[2] < 1e-3);
    }

    #[test]
    fn zero_discriminant_identity() {
        let p = RicciPolynomial {
            c0: 2.0,
            c1: 3.0,
            c2: 4.5,
            t: 0.0,
            x: vec![],
            v: vec![],
            normalization: Normalization::GUnit,
        };
        assert_eq!(p.discriminant(), 0.0);
    }
}
