//! Warped products `M ×_{e^{2f−a}} F`: the fiber quadratic form is scaled by
//! `e^{2f(x)−a}`, `x` the base point.

use std::sync::Arc;

use rayon::prelude::*;

use crate::certifier::{certify_positivity, CertificationReport, Verdict};
use crate::dsl::{Expr, Func};
use crate::geometry::{ChartManifold, GridSpec, ManifoldRep, MetricSource};
use crate::numerics::SymMatrix;
use crate::{Error, Real, Result};

#[derive(Debug, Clone)]
pub struct WarpedProduct<T> {
    pub base: ChartManifold<T>,
    pub fiber: ChartManifold<T>,
    /// Function of the base coordinates.
    pub f: Expr,
    pub a: T,
}

impl<T: Real> WarpedProduct<T> {
    pub fn new(base: ChartManifold<T>, fiber: ChartManifold<T>, f: Expr, a: T) -> Result<Self> {
        if f.arity() > base.dim() {
            return Err(Error::InvalidSpec(format!(
                "warping function {f} uses more than the {} base coordinates",
                base.dim()
            )));
        }
        Ok(Self { base, fiber, f, a })
    }

    pub fn with_shift(&self, a: T) -> Self {
        Self { a, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.fiber.dim()
    }

    /// `2f − a` as an expression on the product chart.
    fn exponent(&self) -> Expr {
        Expr::num(2.0) * self.f.clone() - Expr::num(self.a.as_f64())
    }

    /// The warped metric on the product box.
    pub fn chart(&self) -> Result<ChartManifold<T>> {
        let (nb, nf) = (self.base.dim(), self.fiber.dim());
        let n = nb + nf;
        let name = format!("{}x_w{}", self.base.name, self.fiber.name);
        let lo = [self.base.lo.clone(), self.fiber.lo.clone()].concat();
        let hi = [self.base.hi.clone(), self.fiber.hi.clone()].concat();
        let source = match (&self.base.source, &self.fiber.source) {
            (MetricSource::Exprs(b), MetricSource::Exprs(fc)) => {
                let warp = Expr::call(Func::Exp, self.exponent());
                let (mut ib, mut ifb) = (b.iter(), fc.iter());
                let mut comps = Vec::with_capacity(n * (n + 1) / 2);
                for i in 0..n {
                    for j in i..n {
                        let e = if j < nb {
                            ib.next().cloned()
                        } else if i >= nb {
                            ifb.next().map(|e| warp.clone() * e.remap(&|v| v + nb))
                        } else {
                            Some(Expr::num(0.0))
                        };
                        comps.push(e.ok_or_else(|| Error::InvalidSpec("metric component count".into()))?);
                    }
                }
                MetricSource::Exprs(comps)
            }
            _ => {
                let w = self.clone();
                MetricSource::Closure(Arc::new(move |p: &[T]| w.block_metric(p)))
            }
        };
        let mut c = ChartManifold::new(name, lo, hi, source)?;
        c.margin = self.base.margin.max(self.fiber.margin);
        Ok(c)
    }

    fn block_metric(&self, p: &[T]) -> Result<SymMatrix<T>> {
        let nb = self.base.dim();
        let n = self.dim();
        let gb = self.base.metric(&p[..nb])?;
        let gf = self.fiber.metric(&p[nb..])?;
        let s = self.exponent().eval(&p[..nb])?.exp();
        Ok(SymMatrix::from_fn(n, |i, j| {
            if i < nb && j < nb {
                gb.get(i, j)
            } else if i >= nb && j >= nb {
                s * gf.get(i - nb, j - nb)
            } else {
                T::zero()
            }
        }))
    }
}

/// `diag(g_M, e^{2f−a} g_F)` at `p`.
pub fn warped_metric<T: Real>(w: &WarpedProduct<T>, p: &[T]) -> Result<SymMatrix<T>> {
    w.chart()?.metric(p)
}

/// Ricci form of the warped metric at `p`, from the curvature engine.
pub fn warped_ricci<T: Real>(w: &WarpedProduct<T>, p: &[T]) -> Result<SymMatrix<T>> {
    Ok(w.chart()?.curvature(p)?.ricci)
}

/// Largest `|Ric(∂_i, ∂_α)|` between base and fiber coordinates over `points`.
pub fn mixed_block_residual<T: Real>(w: &WarpedProduct<T>, points: &[Vec<T>]) -> Result<f64> {
    let chart = w.chart()?;
    let nb = w.base.dim();
    let n = w.dim();
    let worst = points
        .par_iter()
        .map(|p| {
            let r = chart.curvature(p)?.ricci;
            let mut m = 0.0f64;
            for i in 0..nb {
                for j in nb..n {
                    m = m.max(r.get(i, j).as_f64().abs());
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSchedule {
    pub a_start: f64,
    pub step: f64,
    pub max_steps: usize,
    pub margin: f64,
}

impl Default for ShiftSchedule {
    fn default() -> Self {
        Self {
            a_start: 0.0,
            step: 1.0,
            max_steps: 60,
            margin: crate::certifier::DEFAULT_MARGIN,
        }
    }
}

/// Smallest `a = a_start + k·step` for which the warped metric certifies
/// positive on `grid`. Base and fiber must certify positive first.
pub fn find_shift<T: Real>(
    w: &WarpedProduct<T>,
    grid: &GridSpec,
    schedule: &ShiftSchedule,
) -> Result<(T, CertificationReport)> {
    for (label, m) in [("base", &w.base), ("fiber", &w.fiber)] {
        let r = certify_positivity(&ManifoldRep::Chart(m.clone()), grid, schedule.margin)?;
        if r.verdict != Verdict::Positive {
            return Err(Error::HypothesisViolated(format!(
                "{label} {} has Ricci eigenvalue {:e} at {:?}",
                m.name, r.min_eig, r.witness
            )));
        }
    }
    for k in 0..schedule.max_steps {
        let a = schedule.a_start + k as f64 * schedule.step;
        let m = ManifoldRep::Chart(w.with_shift(T::lit(a)).chart()?);
        let mut r = certify_positivity(&m, grid, schedule.margin)?;
        if r.verdict == Verdict::Positive {
            r.parameter = Some(a);
            return Ok((T::lit(a), r));
        }
    }
    Err(Error::NotFound {
        iterations: schedule.max_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{flat_torus, product_submersion, round_sphere};
    use crate::dsl::parse;

    fn s2() -> ChartManifold<f64> {
        round_sphere(2, 1.0).unwrap()
    }

    fn cos_f(c: f64) -> Expr {
        parse(&format!("{c}*cos(x)"), &["x", "y"]).unwrap()
    }

    #[test]
    fn constant_f_cancels_shift() {
        let w = WarpedProduct::new(s2(), s2(), Expr::num(0.7), 1.4).unwrap();
        let p = [1.0, 2.0, 1.3, 0.4];
        let g = warped_metric(&w, &p).unwrap();
        let prod = crate::catalog::product(&s2(), &s2()).unwrap().metric(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((g.get(i, j) - prod.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn shift_equivalence_is_exact() {
        let p = [1.1, 0.3, 2.0, 5.0];
        let g1 = warped_metric(&WarpedProduct::new(s2(), s2(), cos_f(0.5), 0.2).unwrap(), &p).unwrap();
        let f2 = cos_f(0.5) + Expr::num(0.25);
        let g2 = warped_metric(&WarpedProduct::new(s2(), s2(), f2, 0.7).unwrap(), &p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((g1.get(i, j) - g2.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_f_is_canonical_variation_of_product() {
        let s = product_submersion(&s2(), &s2()).unwrap();
        let p = [1.2, 0.5, 2.1, 4.0];
        for t in [-1.5, -0.2, 0.4] {
            let w = WarpedProduct::new(s2(), s2(), Expr::num(0.0), -2.0 * t).unwrap();
            let g = warped_metric(&w, &p).unwrap();
            let c = s.canonical_metric(t, &p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((g.get(i, j) - c.get(i, j)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn base_block_matches_closed_form() {
        // Ric(∂_i, ∂_j) = Ric_M − k(Hess f + df ⊗ df) on the base for
        // g_M + e^{2f−a} g_F, k = dim F; f = c cos φ₁ on the unit sphere.
        let c = 0.8;
        let p: [f64; 4] = [1.1, 0.4, 1.7, 2.5];
        let (s, co) = (p[0].sin(), p[0].cos());
        let fp = -c * s;
        let hess = [-c * co, 0.0, s * co * fp];
        let gb = [1.0, 0.0, s * s];
        for a in [0.0, 3.0] {
            let r = warped_ricci(&WarpedProduct::new(s2(), s2(), cos_f(c), a).unwrap(), &p).unwrap();
            let expect = [
                gb[0] - 2.0 * (hess[0] + fp * fp),
                gb[1] - 2.0 * hess[1],
                gb[2] - 2.0 * hess[2],
            ];
            let got = [r.get(0, 0), r.get(0, 1), r.get(1, 1)];
            for (e, g) in expect.iter().zip(&got) {
                assert!((e - g).abs() < 1e-9, "{expect:?} {got:?}");
            }
        }
    }

    #[test]
    fn mixed_block_vanishes() {
        let w = WarpedProduct::new(s2(), s2(), parse("sin(x)*cos(y) + x^2/5", &["x", "y"]).unwrap(), 0.5).unwrap();
        let (lo, hi) = w.chart().unwrap().inner_box();
        let pts = GridSpec::halton(20, 4).points(&lo, &hi);
        assert!(mixed_block_residual(&w, &pts).unwrap() < 1e-6);
    }

    #[test]
    fn round_product_is_positive_at_start() {
        let w = WarpedProduct::new(s2(), s2(), Expr::num(0.0), 0.0).unwrap();
        let (a, r) = find_shift(&w, &GridSpec::uniform(3), &ShiftSchedule::default()).unwrap();
        assert_eq!(a, 0.0);
        assert!((r.min_eig - 1.0).abs() < 1e-6);
    }

    #[test]
    fn small_gradient_needs_a_shift() {
        let w = WarpedProduct::new(s2(), s2(), cos_f(0.2), 0.0).unwrap();
        let g = GridSpec::uniform(3);
        let (a, _) = find_shift(&w, &g, &ShiftSchedule::default()).unwrap();
        let again = certify_positivity(&w.with_shift(a + 1.0).chart().unwrap().into(), &g, 1e-6).unwrap();
        assert_eq!(again.verdict, Verdict::Positive);
    }

    #[test]
    fn flat_fiber_rejected() {
        let w = WarpedProduct::new(s2(), flat_torus(2).unwrap(), Expr::num(0.0), 0.0).unwrap();
        assert!(matches!(
            find_shift(&w, &GridSpec::uniform(2), &ShiftSchedule::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
