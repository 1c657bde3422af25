use std::time::Instant;

use rayon::prelude::*;

use crate::geometry::{GridSpec, ManifoldRep};
use crate::numerics::SphereSampler;
use crate::submersion::{CanonicalVariation, ClosedFormSubmersionData, NumericSubmersion, VariationSource};
use crate::{Error, Real, Result};

use super::polynomial::{Normalization, PolynomialForms};
use super::DEFAULT_MARGIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every sample satisfied the strict inequalities with margin.
    Positive,
    Violated,
}

/// Where the polynomial data comes from.
#[derive(Debug, Clone)]
pub enum CertSource<T> {
    /// Homogeneous data: one point represents all.
    Closed(ClosedFormSubmersionData<T>),
    /// A numeric submersion sampled on a grid of the total chart.
    Numeric { submersion: NumericSubmersion<T>, grid: GridSpec },
}

impl<T: Real> CertSource<T> {
    fn forms(&self) -> Result<Vec<(Vec<f64>, PolynomialForms<T>)>> {
        match self {
            CertSource::Closed(d) => Ok(vec![(Vec::new(), PolynomialForms::new(d)?)]),
            CertSource::Numeric { submersion, grid } => {
                let (lo, hi) = submersion.total.inner_box();
                grid.points(&lo, &hi)
                    .into_par_iter()
                    .map(|p| {
                        let d = submersion.point_data(&p)?;
                        Ok((p.iter().map(|c| c.as_f64()).collect(), PolynomialForms::new(&d)?))
                    })
                    .collect()
            }
        }
    }

    /// The canonical variation at `t` as a metric for [`certify_positivity`].
    pub fn variation_manifold(&self, t: T) -> Result<ManifoldRep<T>> {
        let src = match self {
            CertSource::Closed(d) => VariationSource::ClosedForm(d.clone()),
            CertSource::Numeric { submersion, .. } => VariationSource::Numeric(submersion.clone()),
        };
        CanonicalVariation::new(src, t).manifold()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub t_start: f64,
    pub delta: f64,
    pub max_steps: usize,
    pub margin: f64,
    pub x_samples: usize,
    pub v_samples: usize,
    pub seed: u64,
    pub normalization: Normalization,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            t_start: 0.0,
            delta: 0.5,
            max_steps: 60,
            margin: DEFAULT_MARGIN,
            x_samples: 64,
            v_samples: 32,
            seed: 0,
            normalization: Normalization::TildeUnit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantSample {
    pub point: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub delta_quarter: f64,
}

impl DiscriminantSample {
    fn passes(&self, margin: f64) -> bool {
        self.delta < -margin && self.c0 > margin && self.c2 > margin
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantReport {
    pub t: f64,
    pub samples: Vec<DiscriminantSample>,
    pub max_delta: f64,
    /// Index into `samples` of the worst sample: the largest `Δ` when all
    /// pass, otherwise the first sample that fails.
    pub witness: usize,
    pub min_c0: f64,
    pub min_c2: f64,
    pub verdict: Verdict,
}

fn sweep<T: Real>(
    forms: &[(Vec<f64>, PolynomialForms<T>)],
    t: T,
    xs: &[Vec<T>],
    vs: &[Vec<T>],
    opts: &SearchOptions,
) -> DiscriminantReport {
    let samples: Vec<DiscriminantSample> = forms
        .par_iter()
        .flat_map_iter(|(p, f)| {
            xs.iter().flat_map(move |x| {
                vs.iter().map(move |v| {
                    let (c0, c1, c2) = f.coefficients(t, x, v, opts.normalization);
                    let q = c1 * c1 - c0 * c2;
                    DiscriminantSample {
                        point: p.clone(),
                        x: x.iter().map(|c| c.as_f64()).collect(),
                        v: v.iter().map(|c| c.as_f64()).collect(),
                        c0: c0.as_f64(),
                        c1: c1.as_f64(),
                        c2: c2.as_f64(),
                        delta: (q * T::lit(4.0)).as_f64(),
                        delta_quarter: q.as_f64(),
                    }
                })
            })
        })
        .collect();
    let failing = samples.iter().position(|s| !s.passes(opts.margin));
    let mut max_delta = f64::NEG_INFINITY;
    let mut argmax = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.delta > max_delta {
            max_delta = s.delta;
            argmax = i;
        }
    }
    DiscriminantReport {
        t: t.as_f64(),
        max_delta,
        witness: failing.unwrap_or(argmax),
        min_c0: samples.iter().map(|s| s.c0).fold(f64::INFINITY, f64::min),
        min_c2: samples.iter().map(|s| s.c2).fold(f64::INFINITY, f64::min),
        verdict: if failing.is_some() { Verdict::Violated } else { Verdict::Positive },
        samples,
    }
}

fn check_hypotheses<T: Real>(forms: &[(Vec<f64>, PolynomialForms<T>)], m: f64) -> Result<(usize, usize)> {
    for (p, f) in forms {
        let b = f.min_ric_b().as_f64();
        if b <= m {
            return Err(Error::HypothesisViolated(format!("Ric_B has eigenvalue {b:e} at {p:?}")));
        }
        if let Some(r) = f.min_ric_f() {
            let r = r.as_f64();
            if r <= m {
                return Err(Error::HypothesisViolated(format!("Ric_F has eigenvalue {r:e} at {p:?}")));
            }
        }
    }
    match forms.first() {
        Some((_, f)) => Ok((f.horizontal_dim(), f.vertical_dim())),
        None => Err(Error::InvalidSpec("empty sample grid".into())),
    }
}

fn directions<T: Real>(k: usize, nf: usize, opts: &SearchOptions) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    (
        SphereSampler::new(k, opts.seed).points::<T>(opts.x_samples),
        SphereSampler::new(nf, opts.seed.wrapping_add(1)).points::<T>(opts.v_samples),
    )
}

/// Walks `t = t_start − k δ` until every sampled `(X, V)` at every point
/// has `Δ_t < −margin`, `c0 > margin` and `c2 > margin`.
///
/// Fails with `HypothesisViolated` when `Ric_B` (or `Ric_F` for fibers of
/// dimension at least two) is not positive at a sample point.
pub fn find_certifying_t<T: Real>(src: &CertSource<T>, opts: &SearchOptions) -> Result<(T, DiscriminantReport)> {
    let forms = src.forms()?;
    let (k, nf) = check_hypotheses(&forms, opts.margin)?;
    let (xs, vs) = directions::<T>(k, nf, opts);
    for step in 0..opts.max_steps {
        let t = T::lit(opts.t_start - step as f64 * opts.delta);
        let report = sweep(&forms, t, &xs, &vs, opts);
        if report.verdict == Verdict::Positive {
            return Ok((t, report));
        }
    }
    Err(Error::NotFound {
        iterations: opts.max_steps,
    })
}

/// The discriminant sweep of [`find_certifying_t`] at each of `ts`, with the
/// same samples and hypothesis checks.
pub fn discriminant_scan<T: Real>(src: &CertSource<T>, ts: &[f64], opts: &SearchOptions) -> Result<Vec<DiscriminantReport>> {
    let forms = src.forms()?;
    let (k, nf) = check_hypotheses(&forms, opts.margin)?;
    let (xs, vs) = directions::<T>(k, nf, opts);
    Ok(ts.iter().map(|&t| sweep(&forms, T::lit(t), &xs, &vs, opts)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub parameter: Option<f64>,
    pub grid: String,
    pub points: usize,
    pub min_eig: f64,
    pub witness: Vec<f64>,
    pub margin: f64,
    pub verdict: Verdict,
    pub wall_time: f64,
    /// Sample points and their smallest Ricci eigenvalue, in grid order.
    pub samples: Vec<(Vec<f64>, f64)>,
}

/// Minimum over the grid of the smallest eigenvalue of `Ric` relative to
/// `g`. `Positive` iff that minimum exceeds `margin`.
pub fn certify_positivity<T: Real>(m: &ManifoldRep<T>, grid: &GridSpec, margin: f64) -> Result<CertificationReport> {
    let start = Instant::now();
    let points = m.sample_points(grid);
    let eigs: Vec<T> = points
        .par_iter()
        .map(|p| m.curvature(p)?.min_ricci_eig())
        .collect::<Result<_>>()?;
    let (mut min_eig, mut at) = (f64::INFINITY, 0);
    for (i, e) in eigs.iter().enumerate() {
        let e = e.as_f64();
        if e < min_eig || e.is_nan() {
            min_eig = e;
            at = i;
        }
    }
    Ok(CertificationReport {
        parameter: None,
        grid: grid.describe(),
        points: points.len(),
        min_eig,
        witness: points.get(at).map(|p| p.iter().map(|c| c.as_f64()).collect()).unwrap_or_default(),
        margin,
        verdict: if min_eig > margin { Verdict::Positive } else { Verdict::Violated },
        wall_time: start.elapsed().as_secs_f64(),
        samples: points
            .iter()
            .zip(&eigs)
            .map(|(p, e)| (p.iter().map(|c| c.as_f64()).collect(), e.as_f64()))
            .collect(),
    })
}

/// Boundary of the positive set of a one-parameter family, by bisection on
/// the verdict of [`certify_positivity`]. Fails with `SameSign` if the
/// verdicts at `lo` and `hi` agree.
pub fn positivity_threshold<T: Real>(
    family: impl Fn(f64) -> Result<ManifoldRep<T>>,
    lo: f64,
    hi: f64,
    tol: f64,
    grid: &GridSpec,
    margin: f64,
) -> Result<f64> {
    let verdict = |s: f64| -> Result<Verdict> { Ok(certify_positivity(&family(s)?, grid, margin)?.verdict) };
    let v_lo = verdict(lo)?;
    if v_lo == verdict(hi)? {
        return Err(Error::SameSign);
    }
    let (mut a, mut b) = (lo, hi);
    while (b - a).abs() > tol {
        let mid = 0.5 * (a + b);
        if verdict(mid)? == v_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{berger_sphere, flat_torus, hopf_s3_s2, hopf_s7_s4, product_submersion, round_sphere};
    use crate::geometry::{ChartManifold, MetricSource};
    use crate::numerics::SymMatrix;
    use std::sync::Arc;

    #[test]
    fn berger_verdicts() {
        let g = GridSpec::uniform(1);
        let r = certify_positivity(&berger_sphere::<f64>(1.5).unwrap().into(), &g, DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::Positive);
        assert!((r.min_eig - 1.0).abs() < 1e-6);
        let r = certify_positivity(&berger_sphere::<f64>(2.5).unwrap().into(), &g, DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!((r.min_eig + 1.0).abs() < 1e-6);
    }

    #[test]
    fn torus_is_not_positive() {
        let r = certify_positivity(&flat_torus::<f64>(2).unwrap().into(), &GridSpec::uniform(3), DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn berger_threshold() {
        let e = positivity_threshold(
            |s| Ok(berger_sphere::<f64>(s)?.into()),
            1.0,
            3.0,
            1e-3,
            &GridSpec::uniform(1),
            DEFAULT_MARGIN,
        )
        .unwrap();
        assert!((e - 2.0).abs() < 1e-3);
    }

    #[test]
    fn threshold_needs_sign_change() {
        let r = positivity_threshold(
            |s| Ok(round_sphere::<f64>(2, s)?.into()),
            0.5,
            2.0,
            1e-3,
            &GridSpec::uniform(2),
            DEFAULT_MARGIN,
        );
        assert_eq!(r, Err(Error::SameSign));
    }

    #[test]
    fn linear_synthetic_family() {
        // conformally flat 2-d metric with constant curvature s − 1 near the origin
        let family = |s: f64| -> Result<ManifoldRep<f64>> {
            let k = s - 1.0;
            let f = move |p: &[f64]| {
                let r2 = p[0] * p[0] + p[1] * p[1];
                let c = 4.0 / (1.0 + k * r2).powi(2);
                Ok(SymMatrix::from_fn(2, |i, j| if i == j { c } else { 0.0 }))
            };
            Ok(ChartManifold::new("synthetic", vec![-0.3; 2], vec![0.3; 2], MetricSource::Closure(Arc::new(f)))?.into())
        };
        let s = positivity_threshold(family, 0.0, 2.0, 1e-3, &GridSpec::uniform(2), DEFAULT_MARGIN).unwrap();
        assert!((s - 1.0).abs() < 2e-3, "{s}");
    }

    #[test]
    fn hopf_s3_certified_and_confirmed() {
        let src = CertSource::Closed(hopf_s3_s2::<f64>().unwrap().closed);
        let (t, rep) = find_certifying_t(&src, &SearchOptions::default()).unwrap();
        assert!(t <= 0.0 && rep.verdict == Verdict::Positive);
        let m = src.variation_manifold(t).unwrap();
        let c = certify_positivity(&m, &GridSpec::uniform(1), DEFAULT_MARGIN).unwrap();
        assert_eq!(c.verdict, Verdict::Positive);
    }

    #[test]
    fn hopf_s7_certified() {
        let src = CertSource::Closed(hopf_s7_s4::<f64>().unwrap().closed);
        let (t, rep) = find_certifying_t(&src, &SearchOptions::default()).unwrap();
        assert!(t <= 0.0);
        assert!(rep.max_delta < 0.0);
    }

    #[test]
    fn product_accepts_t_start() {
        let s2 = round_sphere::<f64>(2, 1.0).unwrap();
        let s = product_submersion(&s2, &s2).unwrap();
        let src = CertSource::Numeric {
            submersion: s,
            grid: GridSpec::halton(3, 1),
        };
        let opts = SearchOptions {
            x_samples: 16,
            v_samples: 8,
            ..Default::default()
        };
        let (t, _) = find_certifying_t(&src, &opts).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn flat_base_violates_hypothesis() {
        let t1 = flat_torus::<f64>(1).unwrap();
        let s2 = round_sphere::<f64>(2, 1.0).unwrap();
        let src = CertSource::Numeric {
            submersion: product_submersion(&t1, &s2).unwrap(),
            grid: GridSpec::halton(2, 1),
        };
        assert!(matches!(
            find_certifying_t(&src, &SearchOptions::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
