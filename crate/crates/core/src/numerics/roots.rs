use crate::{Error, Real, Result};

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite signs.
/// Stops when the bracket is narrower than `tol` or `f` hits zero exactly.
pub fn bisect<T: Real>(f: impl Fn(T) -> Result<T>, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    for _ in 0..200 {
        let m = a + (b - a) * T::lit(0.5);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(a + (b - a) * T::lit(0.5))
}

/// Uniform sweep of `points` samples over `[lo, hi]`; returns every
/// sub-bracket on which the sign changes, in increasing order.
pub fn sign_changes<T: Real>(
    f: impl Fn(T) -> Result<T>,
    lo: T,
    hi: T,
    points: usize,
) -> Result<Vec<(T, T)>> {
    let points = points.max(2);
    let step = (hi - lo) / T::from_usize(points - 1).expect("point count");
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo)?;
    for k in 1..points {
        let x = if k == points - 1 {
            hi
        } else {
            lo + step * T::from_usize(k).expect("index")
        };
        let fx = f(x)?;
        if prev_f == T::zero() {
            out.push((prev_x, prev_x));
        } else if fx != T::zero() && fx.signum() != prev_f.signum() {
            out.push((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == T::zero() {
        out.push((prev_x, prev_x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisects_square_root() {
        let r = bisect(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_same_sign() {
        let r = bisect(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn sweep_finds_all_roots() {
        let br = sign_changes(|x: f64| Ok((x - 0.3) * (x - 0.71) * (x + 0.5)), -1.0, 1.0, 201).unwrap();
        assert_eq!(br.len(), 3);
    }
}
