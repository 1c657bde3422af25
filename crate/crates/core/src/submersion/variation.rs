use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{ChartManifold, FrameManifold, ManifoldRep};
use crate::numerics::{seeded_rng, SymMatrix};
use crate::{Error, Real, Result};

use super::closed::{dot, form4, frame_canonical_metric, ClosedFormSubmersionData, Realization};
use super::numeric::NumericSubmersion;

#[derive(Debug, Clone)]
pub enum VariationSource<T> {
    Numeric(NumericSubmersion<T>),
    ClosedForm(ClosedFormSubmersionData<T>),
}

/// `g̃ = e^{2t} g` on vertical vectors, `g` on horizontal ones, with the two
/// distributions kept orthogonal.
#[derive(Debug, Clone)]
pub struct CanonicalVariation<T> {
    pub source: VariationSource<T>,
    pub t: T,
}

impl<T: Real> CanonicalVariation<T> {
    pub fn new(source: VariationSource<T>, t: T) -> Self {
        Self { source, t }
    }

    /// Metric at `p` in the source's basis (chart coordinates, or frame
    /// components for a frame realization, where `p` is ignored).
    pub fn canonical_metric(&self, p: &[T]) -> Result<SymMatrix<T>> {
        match &self.source {
            VariationSource::Numeric(s) => s.canonical_metric(self.t, p),
            VariationSource::ClosedForm(d) => match &d.realization {
                Some(Realization::Frame { manifold, frame }) => {
                    Ok(frame_canonical_metric(&manifold.q, &frame[..d.horizontal_dim()], self.t))
                }
                Some(Realization::Chart { submersion, .. }) => submersion.canonical_metric(self.t, p),
                None => Err(Error::InvalidSpec(format!("{} has no realization", d.name))),
            },
        }
    }

    /// The deformed metric as a manifold the curvature engine accepts.
    pub fn manifold(&self) -> Result<ManifoldRep<T>> {
        let chart = |s: &NumericSubmersion<T>| -> Result<ChartManifold<T>> { s.canonical_chart(self.t) };
        match &self.source {
            VariationSource::Numeric(s) => Ok(chart(s)?.into()),
            VariationSource::ClosedForm(d) => match &d.realization {
                Some(Realization::Frame { manifold, frame }) => {
                    let q = frame_canonical_metric(&manifold.q, &frame[..d.horizontal_dim()], self.t);
                    let m: FrameManifold<T> = manifold.with_metric(q)?;
                    Ok(m.into())
                }
                Some(Realization::Chart { submersion, .. }) => Ok(chart(submersion)?.into()),
                None => Err(Error::InvalidSpec(format!("{} has no realization", d.name))),
            },
        }
    }
}

/// Arguments of the four curvature formulas of the canonical variation.
/// Horizontal vectors have `k` split-frame components, vertical ones `f`;
/// all are meant g-orthonormal within their distribution.
#[derive(Debug, Clone, Copy)]
pub enum VariationArgs<'a, T> {
    /// `K̃(X, Y) = K_B(π_*X, π_*Y)(1 − e^{2t}) + e^{2t} K(X, Y)`.
    Horizontal { x: &'a [T], y: &'a [T] },
    /// `K̃(X, V) = e^{4t} |A*_X V|²`.
    Vertizontal { x: &'a [T], v: &'a [T] },
    /// `K̃(V, W) = e^{2t} K(V, W)`.
    Vertical { v: &'a [T], w: &'a [T] },
    /// `R̃(X, Y, Z, W) = −e^{2t} g((∇_Z A)_X Y, W)`, `W` vertical. The sign
    /// and the slot of the differentiated argument follow this crate's
    /// curvature convention.
    Mixed {
        x: &'a [T],
        y: &'a [T],
        z: &'a [T],
        w: &'a [T],
    },
}

/// Non-reduced curvature of the canonical variation at `t` from the closed
/// formulas.
pub fn variation_curvature<T: Real>(data: &ClosedFormSubmersionData<T>, t: T, args: VariationArgs<'_, T>) -> Result<T> {
    data.require_totally_geodesic()?;
    let e = (t + t).exp();
    Ok(match args {
        VariationArgs::Horizontal { x, y } => data.k_base(x, y) * (T::one() - e) + e * data.k_total(x, y),
        VariationArgs::Vertizontal { x, v } => {
            let s = data.a_star(x, v);
            e * e * dot(&s, &s)
        }
        VariationArgs::Vertical { v, w } => e * data.k_vertical(v, w),
        VariationArgs::Mixed { x, y, z, w } => -e * dot(&data.nabla_a(z, x, y), w),
    })
}

/// Same quantities read off the engine's curvature tensor of `g̃`.
fn direct_value<T: Real>(data: &ClosedFormSubmersionData<T>, r: &[T], args: VariationArgs<'_, T>) -> T {
    let n = data.dim();
    let h = |x: &[T]| data.join(x, &vec![T::zero(); data.vertical_dim()]);
    let v = |w: &[T]| data.join(&vec![T::zero(); data.horizontal_dim()], w);
    match args {
        VariationArgs::Horizontal { x, y } => {
            let (x, y) = (h(x), h(y));
            form4(r, n, &x, &y, &y, &x)
        }
        VariationArgs::Vertizontal { x, v: w } => {
            let (x, w) = (h(x), v(w));
            form4(r, n, &x, &w, &w, &x)
        }
        VariationArgs::Vertical { v: a, w: b } => {
            let (a, b) = (v(a), v(b));
            form4(r, n, &a, &b, &b, &a)
        }
        VariationArgs::Mixed { x, y, z, w } => form4(r, n, &h(x), &h(y), &h(z), &v(w)),
    }
}

fn random_orthonormal<T: Real>(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, count: usize) -> Vec<Vec<T>> {
    loop {
        let cand: Vec<Vec<T>> = (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        T::lit(z)
                    })
                    .collect()
            })
            .collect();
        let basis = crate::numerics::gram_schmidt(&SymMatrix::identity(dim), &cand, count, T::lit(1e-3));
        if basis.len() == count {
            return basis;
        }
    }
}

/// Result of [`cross_check_variation`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub t: f64,
    pub trials: usize,
    /// Max discrepancy per formula (1)–(4); `None` when the formula does not
    /// apply (one-dimensional fibers for (3)).
    pub per_item: [Option<f64>; 4],
    pub max: f64,
    pub witness: String,
}

/// Compares the four closed formulas with the engine's curvature of `g̃` on
/// `trials` random g-orthonormal tuples drawn from `seed`.
pub fn cross_check_variation<T: Real>(
    data: &ClosedFormSubmersionData<T>,
    t: T,
    trials: usize,
    seed: u64,
) -> Result<CrossCheck> {
    data.require_totally_geodesic()?;
    let r = data.direct_split_riemann(t)?;
    let (k, f) = (data.horizontal_dim(), data.vertical_dim());
    let mut rng = seeded_rng(seed);
    let mut per: [Option<f64>; 4] = [None; 4];
    let mut max = 0.0f64;
    let mut witness = String::new();
    let mut note = |item: usize, d: f64, tuple: String, per: &mut [Option<f64>; 4]| {
        per[item] = Some(per[item].unwrap_or(0.0).max(d));
        if d > max || witness.is_empty() {
            max = max.max(d);
            witness = format!("item {} {}", item + 1, tuple);
        }
    };
    for _ in 0..trials {
        let hs = random_orthonormal::<T>(&mut rng, k, k.min(3));
        let vs = random_orthonormal::<T>(&mut rng, f, f.min(2));
        let (x, y) = (&hs[0], &hs[1 % hs.len()]);
        let z = &hs[hs.len() - 1];
        let mut items: Vec<(usize, VariationArgs<'_, T>)> = vec![
            (0, VariationArgs::Horizontal { x, y }),
            (1, VariationArgs::Vertizontal { x, v: &vs[0] }),
            (
                3,
                VariationArgs::Mixed {
                    x,
                    y,
                    z,
                    w: &vs[0],
                },
            ),
        ];
        if vs.len() > 1 {
            items.push((2, VariationArgs::Vertical { v: &vs[0], w: &vs[1] }));
        }
        for (item, args) in items {
            let a = variation_curvature(data, t, args)?;
            let b = direct_value(data, &r, args);
            let d = (a - b).abs().as_f64();
            let tuple = format!("{args:?}");
            note(item, d, tuple, &mut per);
        }
    }
    Ok(CrossCheck {
        t: t.as_f64(),
        trials,
        per_item: per,
        max,
        witness,
    })
}

impl CrossCheck {
    /// `ToleranceExceeded` with the witness when `max > tol`.
    pub fn require(self, tol: f64) -> Result<Self> {
        if self.max > tol {
            return Err(Error::ToleranceExceeded {
                discrepancy: self.max,
                tolerance: tol,
                witness: self.witness,
            });
        }
        Ok(self)
    }
}
