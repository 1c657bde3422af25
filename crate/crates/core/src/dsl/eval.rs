use super::{BinOp, Expr, ExprError, Func};
use crate::numerics::{Dual, Number};
use num_traits::Float;

use crate::Real;

impl Expr {
    /// Evaluates over any [`Number`]: plain scalars, [`Dual`] or
    /// [`crate::numerics::Jet2`]. Domain violations are reported instead of
    /// producing NaN or infinities.
    pub fn eval_with<N: Number>(&self, vars: &[N]) -> Result<N, ExprError> {
        let out = self.eval_inner(vars)?;
        if !out.is_finite() {
            return Err(ExprError::domain("expression is not finite"));
        }
        Ok(out)
    }

    fn eval_inner<N: Number>(&self, vars: &[N]) -> Result<N, ExprError> {
        let zero = <N::Scalar as num_traits::Zero>::zero();
        Ok(match self {
            Expr::Num(v) => N::constant(N::Scalar::lit(*v)),
            Expr::Var(i) => vars
                .get(*i)
                .cloned()
                .ok_or_else(|| ExprError::domain(format!("variable {} is not bound", i + 1)))?,
            Expr::Neg(a) => -a.eval_inner(vars)?,
            Expr::Call(f, a) => {
                let x = a.eval_inner(vars)?;
                let v = x.value();
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => {
                        if v.cos().abs() < N::Scalar::lit(1e-15) {
                            return Err(ExprError::domain("tan at a pole"));
                        }
                        x.tan()
                    }
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if !(v > zero) {
                            return Err(ExprError::domain(format!("log of non-positive value {v}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if v < zero {
                            return Err(ExprError::domain(format!("sqrt of negative value {v}")));
                        }
                        // At 0 the derivatives blow up; plain scalars keep the
                        // value and jets fail the finiteness check.
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                    Func::Cosh => x.cosh(),
                    Func::Sinh => x.sinh(),
                }
            }
            Expr::Bin(op, a, b) => {
                let x = a.eval_inner(vars)?;
                match op {
                    BinOp::Add => x + b.eval_inner(vars)?,
                    BinOp::Sub => x - b.eval_inner(vars)?,
                    BinOp::Mul => x * b.eval_inner(vars)?,
                    BinOp::Div => {
                        let y = b.eval_inner(vars)?;
                        if y.value() == zero {
                            return Err(ExprError::domain("division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => pow(x, b, vars)?,
                }
            }
        })
    }

    /// Plain evaluation at a point.
    pub fn eval<T: Real>(&self, point: &[T]) -> Result<T, ExprError> {
        self.eval_with(point)
    }

    /// Value and first partials along `seeds` (one direction per slot). With
    /// no seeds the coordinate directions are used.
    pub fn eval_dual<T: Real>(&self, point: &[T], seeds: &[Vec<T>]) -> Result<Dual<T>, ExprError> {
        let n = point.len();
        let vars: Vec<Dual<T>> = if seeds.is_empty() {
            (0..n).map(|i| Dual::variable(point[i], i, n)).collect()
        } else {
            (0..n)
                .map(|i| {
                    Dual::seeded(
                        point[i],
                        seeds.iter().map(|s| s.get(i).copied().unwrap_or(T::zero())).collect(),
                    )
                })
                .collect()
        };
        self.eval_with(&vars)
    }
}

fn pow<N: Number>(x: N, exp: &Expr, vars: &[N]) -> Result<N, ExprError> {
    let zero = <N::Scalar as num_traits::Zero>::zero();
    let closed = if exp.arity() == 0 { Some(exp.eval::<f64>(&[])?) } else { None };
    if let Some(c) = closed {
        if c.fract() == 0.0 && c.abs() <= 1024.0 {
            let n = c as i32;
            if n < 0 && x.value() == zero {
                return Err(ExprError::domain("zero raised to a negative power"));
            }
            return Ok(x.powi(n));
        }
        let v = x.value();
        if v < zero {
            return Err(ExprError::domain(format!(
                "negative base {v} with non-integer exponent {c}"
            )));
        }
        if v == zero && c < 0.0 {
            return Err(ExprError::domain("zero raised to a negative power"));
        }
        let cs = N::Scalar::lit(c);
        let one = <N::Scalar as num_traits::One>::one();
        let two = N::Scalar::lit(2.0);
        return Ok(x.chain(
            v.powf(cs),
            cs * v.powf(cs - one),
            cs * (cs - one) * v.powf(cs - two),
        ));
    }
    let y = exp.eval_inner(vars)?;
    if !(x.value() > zero) {
        return Err(ExprError::domain(format!(
            "non-positive base {} with variable exponent",
            x.value()
        )));
    }
    Ok(x.powf(&y))
}
