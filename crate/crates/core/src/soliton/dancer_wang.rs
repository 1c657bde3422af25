use rayon::prelude::*;

use crate::numerics::{bisect, gauss_legendre};
use crate::{Error, Real, Result};

/// Panels of the composite 16-point Gauss–Legendre rule; the integrand is a
/// polynomial times an exponential on an interval of length 2.
pub const DEFAULT_PANELS: usize = 32;

/// Points of the coarse sweep that brackets roots.
pub const SWEEP_POINTS: usize = 200;

/// `I(κ₁) = ∫_{n_r − 1}^{n_r + 1} e^{−2κ₁(x + n₁ + 1)} ∏ (x − p_i/q_i)^{n_i} dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct DWIntegralSpec<T> {
    pub n: Vec<u32>,
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub kappa1: T,
}

impl<T: Real> DWIntegralSpec<T> {
    pub fn new(n: Vec<u32>, p: Vec<T>, q: Vec<T>, kappa1: T) -> Result<Self> {
        let s = Self { n, p, q, kappa1 };
        s.validate()?;
        Ok(s)
    }

    pub fn r(&self) -> usize {
        self.n.len()
    }

    /// Hard errors: mismatched lengths, empty lists, `q_i = 0`.
    pub fn validate(&self) -> Result<()> {
        let r = self.n.len();
        if r == 0 {
            return Err(Error::InvalidSpec("empty n list".into()));
        }
        if self.p.len() != r || self.q.len() != r {
            return Err(Error::InvalidSpec(format!(
                "n, p, q must have equal lengths, got {}, {}, {}",
                r,
                self.p.len(),
                self.q.len()
            )));
        }
        if let Some(i) = self.q.iter().position(|q| *q == T::zero()) {
            return Err(Error::InvalidSpec(format!("q_{} = 0", i + 1)));
        }
        Ok(())
    }

    /// Violations of `r ≥ 3`, `n_i ≥ 1`, `q₁ = q_r = 1` and
    /// `−(n₁+1) q_i < p_i`, `(n_r+1) q_i < p_i` for interior `i`. The integral
    /// is defined regardless.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let r = self.r();
        if r < 3 {
            w.push(format!("r = {r} < 3"));
        }
        if let Some(i) = self.n.iter().position(|&v| v == 0) {
            w.push(format!("n_{} = 0", i + 1));
        }
        if self.q[0] != T::one() || self.q[r - 1] != T::one() {
            w.push("q_1 and q_r are not both 1".into());
        }
        let (n1, nr) = (T::lit(self.n[0] as f64 + 1.0), T::lit(self.n[r - 1] as f64 + 1.0));
        for i in 1..r.saturating_sub(1) {
            if !(-n1 * self.q[i] < self.p[i]) {
                w.push(format!("-(n_1+1) q_{0} < p_{0} fails", i + 1));
            }
            if !(nr * self.q[i] < self.p[i]) {
                w.push(format!("(n_r+1) q_{0} < p_{0} fails", i + 1));
            }
        }
        w
    }

    pub fn admissible(&self) -> bool {
        self.warnings().is_empty()
    }

    /// `[n_r − 1, n_r + 1]`.
    pub fn interval(&self) -> (T, T) {
        let nr = T::lit(self.n[self.r() - 1] as f64);
        (nr - T::one(), nr + T::one())
    }

    /// `∏ (x − p_i/q_i)^{n_i}`.
    pub fn polynomial(&self, x: T) -> T {
        self.n
            .iter()
            .zip(self.p.iter().zip(&self.q))
            .fold(T::one(), |acc, (&n, (&p, &q))| acc * (x - p / q).powi(n as i32))
    }

    pub fn with_kappa(&self, kappa1: T) -> Self {
        Self { kappa1, ..self.clone() }
    }
}

/// `∫_lo^hi e^{−2κ₁(x + n₁ + 1)} factor(x) dx` by composite Gauss–Legendre.
pub fn dw_weighted_integral<T: Real>(
    kappa1: T,
    n1: u32,
    lo: T,
    hi: T,
    factor: impl Fn(T) -> T,
    panels: usize,
) -> T {
    let shift = T::lit(n1 as f64 + 1.0);
    let two = T::lit(2.0);
    gauss_legendre(|x| (-two * kappa1 * (x + shift)).exp() * factor(x), lo, hi, panels)
}

pub fn dw_integral<T: Real>(spec: &DWIntegralSpec<T>) -> Result<T> {
    dw_integral_with(spec, DEFAULT_PANELS)
}

pub fn dw_integral_with<T: Real>(spec: &DWIntegralSpec<T>, panels: usize) -> Result<T> {
    spec.validate()?;
    let (lo, hi) = spec.interval();
    let v = dw_weighted_integral(spec.kappa1, spec.n[0], lo, hi, |x| spec.polynomial(x), panels);
    if !v.is_finite() {
        return Err(Error::NonFinite("I(κ₁)"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DWRoot {
    pub kappa1: f64,
    /// `|I(κ₁)|` at the returned root.
    pub residual: f64,
    /// `∫ |integrand|` at the root; rounding puts a floor near `ε·scale` under
    /// any attainable residual.
    pub scale: f64,
    /// `|κ₁| > tol`: the soliton is not Einstein.
    pub non_einstein: bool,
}

/// All roots of `I` in `[lo, hi]`: a uniform sweep of [`SWEEP_POINTS`]
/// samples, then bisection to `tol` on every sign change.
pub fn dw_find_root<T: Real>(spec: &DWIntegralSpec<T>, lo: T, hi: T, tol: T) -> Result<Vec<DWRoot>> {
    dw_find_root_with(spec, lo, hi, tol, DEFAULT_PANELS)
}

pub fn dw_find_root_with<T: Real>(
    spec: &DWIntegralSpec<T>,
    lo: T,
    hi: T,
    tol: T,
    panels: usize,
) -> Result<Vec<DWRoot>> {
    spec.validate()?;
    let i = |k: T| dw_integral_with(&spec.with_kappa(k), panels);
    let step = (hi - lo) / T::lit((SWEEP_POINTS - 1) as f64);
    let xs: Vec<T> = (0..SWEEP_POINTS)
        .map(|k| if k == SWEEP_POINTS - 1 { hi } else { lo + step * T::lit(k as f64) })
        .collect();
    let vals = xs.par_iter().map(|&k| i(k)).collect::<Result<Vec<T>>>()?;
    let mut brackets = Vec::new();
    for k in 0..xs.len() {
        if vals[k] == T::zero() {
            brackets.push((xs[k], xs[k]));
        } else if k + 1 < xs.len() && vals[k + 1] != T::zero() && vals[k].signum() != vals[k + 1].signum() {
            brackets.push((xs[k], xs[k + 1]));
        }
    }
    if brackets.is_empty() {
        return Err(Error::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    brackets
        .into_iter()
        .map(|(a, b)| {
            let k = if a == b { a } else { bisect(i, a, b, tol)? };
            let s = spec.with_kappa(k);
            let (lo, hi) = s.interval();
            let scale = dw_weighted_integral(k, s.n[0], lo, hi, |x| s.polynomial(x).abs(), panels);
            Ok(DWRoot {
                kappa1: k.as_f64(),
                residual: i(k)?.abs().as_f64(),
                scale: scale.as_f64(),
                non_einstein: k.abs() > tol,
            })
        })
        .collect()
}
