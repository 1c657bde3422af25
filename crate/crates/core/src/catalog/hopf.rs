use crate::dsl::{Expr, Func};
use crate::geometry::{ChartManifold, FrameManifold, MetricSource};
use crate::numerics::SymMatrix;
use crate::submersion::{ClosedFormSubmersionData, NumericSubmersion, Realization};
use crate::{Real, Result};

/// Both descriptions of a Hopf fibration: the numeric submersion between
/// graph charts and hand-supplied homogeneous data.
#[derive(Debug, Clone)]
pub struct HopfModel<T> {
    pub numeric: NumericSubmersion<T>,
    pub closed: ClosedFormSubmersionData<T>,
}

fn sum_sq(n: usize) -> Expr {
    (0..n)
        .map(|i| Expr::var(i) * Expr::var(i))
        .reduce(|a, b| a + b)
        .unwrap_or(Expr::Num(0.0))
}

/// Graph chart of the sphere of radius `r` in `R^{n+1}` around the pole:
/// coordinates `w` with the point `r(√(1 − |w|²), w)`, metric
/// `r²(δ + w wᵀ / (1 − |w|²))` on the box `[−half, half]^n`.
pub fn graph_sphere_chart<T: Real>(name: &str, n: usize, r: f64, half: f64) -> Result<ChartManifold<T>> {
    let denom = Expr::num(1.0) - sum_sq(n);
    let r2 = r * r;
    let mut comps = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let off = Expr::var(i) * Expr::var(j) / denom.clone();
            let e = if i == j { Expr::num(1.0) + off } else { off };
            comps.push(if r2 == 1.0 { e } else { Expr::num(r2) * e });
        }
    }
    ChartManifold::new(
        name,
        vec![T::lit(-half); n],
        vec![T::lit(half); n],
        MetricSource::Exprs(comps),
    )
}

/// Quaternion with expression components.
#[derive(Clone)]
struct QExpr([Expr; 4]);

impl QExpr {
    fn conj(&self) -> Self {
        let [a, b, c, d] = self.0.clone();
        QExpr([a, -b, -c, -d])
    }

    fn mul(&self, o: &Self) -> Self {
        let [p0, p1, p2, p3] = self.0.clone();
        let [q0, q1, q2, q3] = o.0.clone();
        let m = |a: &Expr, b: &Expr| a.clone() * b.clone();
        QExpr([
            m(&p0, &q0) - m(&p1, &q1) - m(&p2, &q2) - m(&p3, &q3),
            m(&p0, &q1) + m(&p1, &q0) + m(&p2, &q3) - m(&p3, &q2),
            m(&p0, &q2) - m(&p1, &q3) + m(&p2, &q0) + m(&p3, &q1),
            m(&p0, &q3) + m(&p1, &q2) - m(&p2, &q1) + m(&p3, &q0),
        ])
    }
}

/// Real part of a unit quaternion from its imaginary part in `w_0..w_{n-1}`.
fn graph_height(n: usize) -> Expr {
    Expr::call(Func::Sqrt, Expr::num(1.0) - sum_sq(n))
}

/// `R_abcd = κ(δ_ad δ_bc − δ_ac δ_bd)`: constant curvature `κ`.
pub fn constant_curvature_tensor<T: Real>(n: usize, kappa: f64) -> Vec<T> {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut r = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    r.push(T::lit(kappa * (d(a, e) * d(b, c) - d(a, c) * d(b, e))));
                }
            }
        }
    }
    r
}

fn unit<T: Real>(n: usize, i: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[i] = T::one();
    e
}

/// `S¹ → S³ → S²(1/2)`, `q ↦ ½ q i q̄`.
///
/// Numeric side: graph chart of `S³` at `1` with `q = √(1−|w|²) + w₁i + w₂j + w₃k`,
/// image in the graph chart of `S²(1/2)` at `½ i`. Closed side: the
/// left-invariant frame `i, j, k` with vertical `e₁ = i` and horizontal
/// `e₂, e₃`; `A_{e₂} e₃ = e₁`, `∇A = 0`, `K = 1`, `K_B = 4`.
pub fn hopf_s3_s2<T: Real>() -> Result<HopfModel<T>> {
    let total = graph_sphere_chart::<T>("S3", 3, 1.0, 0.2)?;
    let base = graph_sphere_chart::<T>("S2(1/2)", 2, 0.5, 0.7)?;
    let s = graph_height(3);
    let (w1, w2, w3) = (Expr::var(0), Expr::var(1), Expr::var(2));
    let proj = vec![
        Expr::num(2.0) * (w1.clone() * w2.clone() + s.clone() * w3.clone()),
        Expr::num(2.0) * (w1 * w3 - s * w2),
    ];
    let numeric = NumericSubmersion::new("hopf_s3_s2", total, base, proj)?;

    let mut a = vec![T::zero(); 4];
    a[1] = T::one();
    a[2] = -T::one();
    let closed = ClosedFormSubmersionData::new(
        "hopf_s3_s2",
        2,
        1,
        constant_curvature_tensor(3, 1.0),
        constant_curvature_tensor(2, 4.0),
        a,
        vec![T::zero(); 8],
    )?;
    let frame = FrameManifold::s3("S3", SymMatrix::identity(3))?;
    let closed = closed.with_realization(Realization::Frame {
        manifold: frame,
        frame: vec![unit(3, 1), unit(3, 2), unit(3, 0)],
    });
    Ok(HopfModel { numeric, closed })
}

/// `S³ → S⁷ → S⁴(1/2)`, `(a, b) ↦ ½(|a|² − |b|², 2 a b̄)` with fibers the
/// orbits of `(a, b) q`.
///
/// Numeric side: graph chart of `S⁷` at `(1, 0)` with
/// `a = √(1−|w|²) + w₁i + w₂j + w₃k`, `b = w₄ + w₅i + w₆j + w₇k`; image in
/// the graph chart of `S⁴(1/2)` at the pole, coordinates `2 a b̄`. Closed
/// side, at `w = 0` with horizontal `∂w₄ … ∂w₇` (a quaternion `x`) and
/// vertical `∂w₁ … ∂w₃` (imaginary `ξ`): `A_x y = Im(y x̄)`, `∇A = 0`,
/// `K = 1`, `K_B = 4`.
pub fn hopf_s7_s4<T: Real>() -> Result<HopfModel<T>> {
    let total = graph_sphere_chart::<T>("S7", 7, 1.0, 0.12)?;
    let base = graph_sphere_chart::<T>("S4(1/2)", 4, 0.5, 0.49)?;
    let s = graph_height(7);
    let a = QExpr([s, Expr::var(0), Expr::var(1), Expr::var(2)]);
    let b = QExpr([Expr::var(3), Expr::var(4), Expr::var(5), Expr::var(6)]);
    let ab = a.mul(&b.conj());
    let proj: Vec<Expr> = ab.0.into_iter().map(|c| Expr::num(2.0) * c).collect();
    let numeric = NumericSubmersion::new("hopf_s7_s4", total, base, proj)?;

    // A_{h_i} h_j = Im(e_j ē_i) for the quaternion units e_0 = 1, e_1 = i, ...
    let units = [
        crate::numerics::Quaternion::<f64>::one(),
        crate::numerics::Quaternion::i(),
        crate::numerics::Quaternion::j(),
        crate::numerics::Quaternion::k(),
    ];
    let mut acoef = vec![T::zero(); 3 * 16];
    for (i, ei) in units.iter().enumerate() {
        for (j, ej) in units.iter().enumerate() {
            let p = *ej * ei.conj();
            for (v, c) in [p.x, p.y, p.z].into_iter().enumerate() {
                acoef[(v * 4 + i) * 4 + j] = T::lit(c);
            }
        }
    }
    let closed = ClosedFormSubmersionData::new(
        "hopf_s7_s4",
        4,
        3,
        constant_curvature_tensor(7, 1.0),
        constant_curvature_tensor(4, 4.0),
        acoef,
        vec![T::zero(); 64 * 3],
    )?;
    let frame: Vec<Vec<T>> = (3..7).chain(0..3).map(|i| unit(7, i)).collect();
    let closed = closed.with_realization(Realization::Chart {
        submersion: Box::new(numeric.clone()),
        point: vec![T::zero(); 7],
        frame,
    });
    Ok(HopfModel { numeric, closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submersion::cross_check_variation;

    fn compare_a(model: &HopfModel<f64>, p: &[f64]) -> f64 {
        let d = model.numeric.point_data(p).unwrap();
        let c = &model.closed;
        let k = c.horizontal_dim();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let (x, y) = (unit::<f64>(k, i), unit::<f64>(k, j));
                let a = d.a_map(&x, &y);
                let b = c.a_map(&x, &y);
                for (u, v) in a.iter().zip(&b) {
                    worst = worst.max((u - v).abs());
                }
            }
        }
        worst
    }

    #[test]
    fn s3_numeric_a_matches_closed_form_at_pole() {
        let m = hopf_s3_s2::<f64>().unwrap();
        assert!(compare_a(&m, &[0.0; 3]) < 1e-12);
    }

    #[test]
    fn s7_numeric_a_matches_closed_form_at_pole() {
        let m = hopf_s7_s4::<f64>().unwrap();
        assert!(compare_a(&m, &[0.0; 7]) < 1e-12);
    }

    #[test]
    fn s3_cross_check() {
        let m = hopf_s3_s2::<f64>().unwrap();
        for t in [-1.0, -0.3, 0.0, 0.5] {
            let c = cross_check_variation(&m.closed, t, 100, 7).unwrap();
            assert!(c.max < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn s7_cross_check() {
        let m = hopf_s7_s4::<f64>().unwrap();
        let c = cross_check_variation(&m.closed, -0.5, 100, 7).unwrap();
        assert!(c.max < 1e-9, "{c:?}");
    }

    #[test]
    fn numeric_point_data_off_the_pole_is_totally_geodesic() {
        let m = hopf_s3_s2::<f64>().unwrap();
        let d = m.numeric.point_data(&[0.1, -0.05, 0.12]).unwrap();
        assert!(d.t_norm < 1e-9);
        let c = cross_check_variation(&d, -0.4, 20, 3).unwrap();
        assert!(c.max < 1e-6, "{c:?}");
    }
}
