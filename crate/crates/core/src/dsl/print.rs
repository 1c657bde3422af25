use std::fmt::{self, Write};

use super::{BinOp, Expr};

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
        Expr::Neg(_) => UNARY,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => MUL,
        Expr::Bin(BinOp::Pow, ..) => POW,
    }
}

impl Expr {
    /// Prints with the given variable names (`x1`, `x2`, … when a name is
    /// missing). Parentheses are inserted only where the grammar needs them,
    /// and literals use the shortest round-trip decimal form, so parsing the
    /// output with the same names gives back an equal tree.
    pub fn to_source(&self, names: &[&str]) -> String {
        let mut s = String::new();
        write_expr(&mut s, self, names, 0).expect("string write");
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source(&[]))
    }
}

fn write_expr(s: &mut String, e: &Expr, names: &[&str], min: u8) -> fmt::Result {
    let p = prec(e);
    let paren = p < min;
    if paren {
        s.push('(');
    }
    match e {
        Expr::Num(v) => {
            if v.is_finite() {
                write!(s, "{v:?}")?;
            } else {
                // Not reachable from parsed input; printed so that it fails
                // loudly on re-parse instead of silently changing value.
                write!(s, "{v}")?;
            }
        }
        Expr::Var(i) => match names.get(*i) {
            Some(n) => s.push_str(n),
            None => write!(s, "x{}", i + 1)?,
        },
        Expr::Neg(a) => {
            s.push('-');
            write_expr(s, a, names, UNARY)?;
        }
        Expr::Call(f, a) => {
            s.push_str(f.name());
            s.push('(');
            write_expr(s, a, names, 0)?;
            s.push(')');
        }
        Expr::Bin(op, a, b) => {
            let (sym, lmin, rmin) = match op {
                BinOp::Add => (" + ", ADD, MUL),
                BinOp::Sub => (" - ", ADD, MUL),
                BinOp::Mul => (" * ", MUL, UNARY),
                BinOp::Div => (" / ", MUL, UNARY),
                BinOp::Pow => ("^", ATOM, UNARY),
            };
            write_expr(s, a, names, lmin)?;
            s.push_str(sym);
            write_expr(s, b, names, rmin)?;
        }
    }
    if paren {
        s.push(')');
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    fn rt(src: &str, vars: &[&str]) {
        let e = parse(src, vars).unwrap();
        let out = e.to_source(vars);
        assert_eq!(parse(&out, vars).unwrap(), e, "{src} printed as {out}");
    }

    #[test]
    fn round_trips() {
        let v = ["x1", "x2"];
        for src in [
            "sin(x1)^2",
            "2 - 3 - 4",
            "2 - (3 - 4)",
            "-x1^2",
            "(-x1)^2",
            "2^3^2",
            "(2^3)^2",
            "x1 / (x2 * x1)",
            "x1 * -x2",
            "- -x1",
            "exp(-2 * x1) + 1e-12",
            "(x1 + x2)^-1.5",
            "pi * cosh(x2 / 3)",
        ] {
            rt(src, &v);
        }
    }

    #[test]
    fn minimal_parentheses() {
        let e = parse("((x1 + x2)) * (x1)", &["x1", "x2"]).unwrap();
        assert_eq!(e.to_source(&["x1", "x2"]), "(x1 + x2) * x1");
        assert_eq!(e.to_string(), "(x1 + x2) * x1");
    }
}
