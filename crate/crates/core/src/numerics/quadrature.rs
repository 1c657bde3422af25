use crate::{Error, Real, Result};

const MAX_DEPTH: usize = 60;

/// Adaptive Simpson quadrature with Richardson correction.
///
/// Each half panel receives half the tolerance of its parent. A panel
/// is also accepted once its two estimates agree to rounding level, which
/// keeps tight tolerances from recursing into floating-point noise.
pub fn adaptive_quadrature<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<T> {
    if !(lo < hi) {
        return Err(Error::InvalidSpec(format!(
            "quadrature bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let fa = f(lo);
    let fb = f(hi);
    let m = (lo + hi) * T::lit(0.5);
    let fm = f(m);
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(Error::NonFinite("quadrature integrand"));
    }
    let whole = simpson(lo, hi, fa, fm, fb);
    recurse(&f, lo, hi, fa, fm, fb, whole, tol, 0)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> Result<T> {
    let m = (a + b) * T::lit(0.5);
    let lm = (a + m) * T::lit(0.5);
    let rm = (m + b) * T::lit(0.5);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::NonFinite("quadrature integrand"));
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let fifteen = T::lit(15.0);
    let noise = T::lit(64.0) * T::epsilon() * (left.abs() + right.abs());
    if delta.abs() <= fifteen * tol || delta.abs() <= noise {
        return Ok(left + right + delta / fifteen);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::MaxSubdivisions {
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    let half = T::lit(0.5);
    let l = recurse(f, a, m, fa, flm, fm, left, tol * half, depth + 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, tol * half, depth + 1)?;
    Ok(l + r)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_rule<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut rule = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((T::lit(x), T::lit(w)));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    rule
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite 16-point Gauss–Legendre quadrature over `panels` equal panels.
pub fn gauss_legendre<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, panels: usize) -> T {
    let rule = gauss_legendre_rule::<T>(16);
    let panels = panels.max(1);
    let h = (hi - lo) / T::from_usize(panels).expect("panel count");
    let half = h * T::lit(0.5);
    let mut total = T::zero();
    for p in 0..panels {
        let a = lo + h * T::from_usize(p).expect("panel index");
        let mid = a + half;
        let mut s = T::zero();
        for &(x, w) in &rule {
            s = s + w * f(mid + half * x);
        }
        total = total + s * half;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_cubic() {
        let one = adaptive_quadrature(|_x: f64| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((one - 1.0).abs() < 1e-15);
        let cubic = adaptive_quadrature(|x: f64| x * x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((cubic - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exponential() {
        let v = adaptive_quadrature(|x: f64| (-2.0 * x).exp(), 0.0, 1.0, 1e-12).unwrap();
        let exact = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_agrees_with_simpson() {
        let f = |x: f64| (3.0 * x).sin() * (-x * x).exp();
        let a = adaptive_quadrature(f, -1.0, 2.0, 1e-13).unwrap();
        let b = gauss_legendre(f, -1.0, 2.0, 8);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let s: f64 = gauss_legendre_rule::<f64>(16).iter().map(|r| r.1).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(adaptive_quadrature(|x: f64| x, 1.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn reports_unreachable_tolerance() {
        // A jump on a huge interval stays unresolved at the recursion cap.
        let step = |x: f64| if x < 1.0 { 0.0 } else { 1.0 };
        let r = adaptive_quadrature(step, 0.0, 1e30, 1e-9);
        assert!(matches!(r, Err(Error::MaxSubdivisions { .. })));
    }
}
