use super::{BinOp, Expr, Func};

fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), Some(y)) => Expr::num(x + y),
        _ => a + b,
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), _) if x == 0.0 => neg(b),
        (Some(x), Some(y)) => Expr::num(x - y),
        _ => a - b,
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Neg(inner) => *inner,
        other => match other.as_const() {
            Some(v) if v == 0.0 => Expr::Num(0.0),
            _ => -other,
        },
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), Some(y)) => Expr::num(x * y),
        _ => a * b,
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), _) if x == 0.0 => Expr::Num(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => a / b,
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match b.as_const() {
        Some(y) if y == 0.0 => Expr::Num(1.0),
        Some(y) if y == 1.0 => a,
        _ => Expr::Bin(BinOp::Pow, Box::new(a), Box::new(b)),
    }
}

impl Expr {
    /// Symbolic partial derivative with respect to variable `i`, with
    /// constant folding of the trivial 0/1 cases.
    pub fn diff(&self, i: usize) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(j) => Expr::Num(if *j == i { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(i)),
            Expr::Bin(op, a, b) => {
                let (da, db) = (a.diff(i), b.diff(i));
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b.clone()), mul(a, db)),
                    BinOp::Div => sub(
                        div(da, b.clone()),
                        div(mul(a, db), pow(b, Expr::Num(2.0))),
                    ),
                    BinOp::Pow => {
                        if let Some(c) = b.as_const() {
                            mul(mul(Expr::num(c), pow(a, Expr::num(c - 1.0))), da)
                        } else {
                            let ln_a = Expr::call(Func::Log, a.clone());
                            let whole = pow(a.clone(), b.clone());
                            mul(whole, add(mul(db, ln_a), div(mul(b, da), a)))
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let da = a.diff(i);
                if da.as_const() == Some(0.0) {
                    return Expr::Num(0.0);
                }
                let u = (**a).clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Cos => neg(Expr::call(Func::Sin, u)),
                    Func::Tan => add(Expr::Num(1.0), pow(Expr::call(Func::Tan, u), Expr::Num(2.0))),
                    Func::Exp => Expr::call(Func::Exp, u),
                    Func::Log => div(Expr::Num(1.0), u),
                    Func::Sqrt => div(Expr::Num(0.5), Expr::call(Func::Sqrt, u)),
                    Func::Abs => div(u.clone(), Expr::call(Func::Abs, u)),
                    Func::Cosh => Expr::call(Func::Sinh, u),
                    Func::Sinh => Expr::call(Func::Cosh, u),
                };
                mul(outer, da)
            }
        }
    }

    /// Gradient as a vector of expressions over `n` variables.
    pub fn gradient(&self, n: usize) -> Vec<Expr> {
        (0..n).map(|i| self.diff(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    fn check(src: &str, x: &[f64]) {
        let names = ["x1", "x2", "x3"];
        let e = parse(src, &names[..x.len()]).unwrap();
        let d = e.eval_dual(x, &[]).unwrap();
        for i in 0..x.len() {
            let s = e.diff(i).eval(x).unwrap();
            assert!(
                (s - d.partial(i)).abs() <= 1e-12 * (1.0 + s.abs()),
                "{src}: d/dx{} symbolic {s} vs dual {}",
                i + 1,
                d.partial(i)
            );
        }
    }

    #[test]
    fn matches_dual_numbers() {
        let p = [0.7, 1.3, -0.4];
        for src in [
            "x1 * x2 + x3",
            "x1 / (x2 + 2)",
            "sin(x1)^2 * cos(x2)",
            "exp(x1 * x3) - log(x2)",
            "sqrt(x2) * tan(x1)",
            "x2^x1",
            "abs(x3) + cosh(x1) * sinh(x2)",
            "(x1 + x2)^-1.5",
            "-x1^3 / x2",
        ] {
            check(src, &p);
        }
    }

    #[test]
    fn folds_trivial_terms() {
        let e = parse("3 * x1 + x2", &["x1", "x2"]).unwrap();
        assert_eq!(e.diff(0), super::Expr::Num(3.0));
        assert_eq!(e.diff(1), super::Expr::Num(1.0));
        assert_eq!(parse("sin(x2)", &["x1", "x2"]).unwrap().diff(0), super::Expr::Num(0.0));
    }
}
