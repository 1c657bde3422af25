//! Forward-mode automatic differentiation.
//!
//! [`Dual`] carries first partials, [`Jet2`] carries first and second
//! partials. Both store derivative slots densely; an empty slot vector means
//! every partial is zero, so constants need not know the number of active
//! variables.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive, One, Zero};

use crate::Real;

/// Arithmetic that expression evaluation and the metric algebra are generic
/// over. Elementary functions are expressed through [`Number::chain`], which
/// lifts a scalar function given its value and first two derivatives.
pub trait Number:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Scalar: Real;

    fn constant(c: Self::Scalar) -> Self;
    fn value(&self) -> Self::Scalar;
    /// Applies a scalar function with value `f0`, derivative `f1` and second
    /// derivative `f2` at `self.value()`.
    fn chain(&self, f0: Self::Scalar, f1: Self::Scalar, f2: Self::Scalar) -> Self;
    fn scale(&self, c: Self::Scalar) -> Self;
    /// True when the value and every carried derivative are finite.
    fn is_finite(&self) -> bool;

    /// Constant from an `f64` literal.
    fn cst(c: f64) -> Self {
        Self::constant(Self::Scalar::lit(c))
    }

    fn sin(&self) -> Self {
        let v = self.value();
        self.chain(v.sin(), v.cos(), -v.sin())
    }

    fn cos(&self) -> Self {
        let v = self.value();
        self.chain(v.cos(), -v.sin(), -v.cos())
    }

    fn tan(&self) -> Self {
        let v = self.value();
        let t = v.tan();
        let sec2 = Self::Scalar::one() + t * t;
        self.chain(t, sec2, Self::Scalar::lit(2.0) * t * sec2)
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.chain(e, e, e)
    }

    fn ln(&self) -> Self {
        let v = self.value();
        self.chain(v.ln(), v.recip(), -(v * v).recip())
    }

    fn sqrt(&self) -> Self {
        let v = self.value();
        let s = v.sqrt();
        let half = Self::Scalar::lit(0.5);
        self.chain(s, half / s, -half * half / (s * v))
    }

    fn abs(&self) -> Self {
        let v = self.value();
        let sign = if v < Self::Scalar::zero() {
            -Self::Scalar::one()
        } else {
            Self::Scalar::one()
        };
        self.chain(v.abs(), sign, Self::Scalar::zero())
    }

    fn sinh(&self) -> Self {
        let v = self.value();
        self.chain(v.sinh(), v.cosh(), v.sinh())
    }

    fn cosh(&self) -> Self {
        let v = self.value();
        self.chain(v.cosh(), v.sinh(), v.cosh())
    }

    fn recip(&self) -> Self {
        let v = self.value();
        let r = v.recip();
        self.chain(r, -r * r, Self::Scalar::lit(2.0) * r * r * r)
    }

    fn powi(&self, n: i32) -> Self {
        let v = self.value();
        let nf = Self::Scalar::from_i32(n).expect("small exponent");
        let one = Self::Scalar::one();
        let f1 = if n == 0 { Self::Scalar::zero() } else { nf * v.powi(n - 1) };
        let f2 = if n == 0 || n == 1 {
            Self::Scalar::zero()
        } else {
            nf * (nf - one) * v.powi(n - 2)
        };
        self.chain(v.powi(n), f1, f2)
    }

    /// `self^e` for a positive base.
    fn powf(&self, e: &Self) -> Self {
        (e.clone() * self.ln()).exp()
    }
}

impl<T: Real> Number for T {
    type Scalar = T;

    fn constant(c: T) -> Self {
        c
    }
    fn value(&self) -> T {
        *self
    }
    fn chain(&self, f0: T, _f1: T, _f2: T) -> Self {
        f0
    }
    fn scale(&self, c: T) -> Self {
        *self * c
    }
    fn is_finite(&self) -> bool {
        num_traits::Float::is_finite(*self)
    }
}

/// Value plus first partials.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub partials: Vec<T>,
}

impl<T: Real> Dual<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            partials: Vec::new(),
        }
    }

    /// Independent variable `index` out of `n` active variables.
    pub fn variable(value: T, index: usize, n: usize) -> Self {
        let mut partials = vec![T::zero(); n];
        partials[index] = T::one();
        Self { value, partials }
    }

    /// Seeds the value with an explicit direction (directional derivative).
    pub fn seeded(value: T, partials: Vec<T>) -> Self {
        Self { value, partials }
    }

    pub fn partial(&self, i: usize) -> T {
        self.partials.get(i).copied().unwrap_or_else(T::zero)
    }
}

fn combine<T: Real>(a: &[T], b: &[T], f: impl Fn(T, T) -> T) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            f(
                a.get(i).copied().unwrap_or_else(T::zero),
                b.get(i).copied().unwrap_or_else(T::zero),
            )
        })
        .collect()
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            partials: combine(&self.partials, &o.partials, |x, y| x + y),
        }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            value: self.value - o.value,
            partials: combine(&self.partials, &o.partials, |x, y| x - y),
        }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.value, o.value);
        Self {
            value: a * b,
            partials: combine(&self.partials, &o.partials, |x, y| x * b + a * y),
        }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let (a, b) = (self.value, o.value);
        let b2 = b * b;
        Self {
            value: a / b,
            partials: combine(&self.partials, &o.partials, |x, y| (x * b - a * y) / b2),
        }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            partials: self.partials.into_iter().map(|x| -x).collect(),
        }
    }
}

impl<T: Real> Number for Dual<T> {
    type Scalar = T;

    fn constant(c: T) -> Self {
        Dual::constant(c)
    }
    fn value(&self) -> T {
        self.value
    }
    fn chain(&self, f0: T, f1: T, _f2: T) -> Self {
        Self {
            value: f0,
            partials: self.partials.iter().map(|&d| f1 * d).collect(),
        }
    }
    fn scale(&self, c: T) -> Self {
        Self {
            value: self.value * c,
            partials: self.partials.iter().map(|&d| d * c).collect(),
        }
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.partials.iter().all(|d| d.is_finite())
    }
}

/// Value, gradient and Hessian with respect to `n` active variables.
/// The Hessian is stored densely, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub hess: Vec<T>,
}

impl<T: Real> Jet2<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    pub fn variable(value: T, index: usize, n: usize) -> Self {
        let mut grad = vec![T::zero(); n];
        grad[index] = T::one();
        Self {
            value,
            grad,
            hess: vec![T::zero(); n * n],
        }
    }

    /// Seeds every coordinate of `point` as an active variable.
    pub fn variables(point: &[T]) -> Vec<Self> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self::variable(v, i, n))
            .collect()
    }

    fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn d(&self, i: usize) -> T {
        self.grad.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn dd(&self, i: usize, j: usize) -> T {
        let n = self.dim();
        if n == 0 {
            T::zero()
        } else {
            self.hess[i * n + j]
        }
    }

    fn outer_sym(a: &[T], b: &[T], n: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n * n];
        if a.is_empty() || b.is_empty() {
            return out;
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = a[i] * b[j] + b[i] * a[j];
            }
        }
        out
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            grad: combine(&self.grad, &o.grad, |x, y| x + y),
            hess: combine(&self.hess, &o.hess, |x, y| x + y),
        }
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            value: self.value - o.value,
            grad: combine(&self.grad, &o.grad, |x, y| x - y),
            hess: combine(&self.hess, &o.hess, |x, y| x - y),
        }
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.value, o.value);
        let n = self.dim().max(o.dim());
        let cross = Self::outer_sym(&self.grad, &o.grad, n);
        let lin = combine(&self.hess, &o.hess, |x, y| x * b + a * y);
        Self {
            value: a * b,
            grad: combine(&self.grad, &o.grad, |x, y| x * b + a * y),
            hess: combine(&lin, &cross, |x, y| x + y),
        }
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            grad: self.grad.into_iter().map(|x| -x).collect(),
            hess: self.hess.into_iter().map(|x| -x).collect(),
        }
    }
}

impl<T: Real> Number for Jet2<T> {
    type Scalar = T;

    fn constant(c: T) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> T {
        self.value
    }
    fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let n = self.dim();
        let mut hess: Vec<T> = self.hess.iter().map(|&h| f1 * h).collect();
        if n > 0 {
            for i in 0..n {
                for j in 0..n {
                    hess[i * n + j] = hess[i * n + j] + f2 * self.grad[i] * self.grad[j];
                }
            }
        }
        Self {
            value: f0,
            grad: self.grad.iter().map(|&g| f1 * g).collect(),
            hess,
        }
    }
    fn scale(&self, c: T) -> Self {
        Self {
            value: self.value * c,
            grad: self.grad.iter().map(|&g| g * c).collect(),
            hess: self.hess.iter().map(|&h| h * c).collect(),
        }
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|d| d.is_finite())
            && self.hess.iter().all(|d| d.is_finite())
    }
}
