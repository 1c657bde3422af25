use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dsl::{Expr, Func};
use crate::geometry::{ChartManifold, FrameManifold, ManifoldRep, MetricSource};
use crate::numerics::SymMatrix;
use crate::submersion::{ClosedFormSubmersionData, NumericSubmersion};
use crate::{Error, Real, Result};

use super::hopf::{hopf_s3_s2, hopf_s7_s4};

/// Polar angles are kept this far from the coordinate singularities.
pub const POLAR_INSET: f64 = 0.2;

/// `Sⁿ(r)` in hyperspherical angles `φ₁ … φₙ`:
/// `r²(dφ₁² + sin²φ₁ dφ₂² + sin²φ₁ sin²φ₂ dφ₃² + …)`, with
/// `φ₁ … φₙ₋₁ ∈ [0.2, π − 0.2]` and `φₙ ∈ [0, 2π]`.
pub fn round_sphere<T: Real>(n: usize, r: f64) -> Result<ChartManifold<T>> {
    if n == 0 || !(r > 0.0) || !r.is_finite() {
        return Err(Error::BadParams(format!("round_sphere needs n ≥ 1 and r > 0, got n = {n}, r = {r}")));
    }
    let mut comps = Vec::with_capacity(n * (n + 1) / 2);
    let mut factor = Expr::num(r * r);
    for i in 0..n {
        for j in i..n {
            comps.push(if i == j { factor.clone() } else { Expr::num(0.0) });
        }
        let s = Expr::call(Func::Sin, Expr::var(i));
        factor = factor * s.clone() * s;
    }
    let mut lo = vec![T::lit(POLAR_INSET); n];
    let mut hi = vec![T::lit(PI - POLAR_INSET); n];
    lo[n - 1] = T::zero();
    hi[n - 1] = T::lit(2.0 * PI);
    ChartManifold::new(format!("S{n}({r})"), lo, hi, MetricSource::Exprs(comps))
}

/// `Tⁿ = Rⁿ / 2πZⁿ` with the flat metric on `[0, 2π]ⁿ`.
pub fn flat_torus<T: Real>(n: usize) -> Result<ChartManifold<T>> {
    if n == 0 {
        return Err(Error::BadParams("flat_torus needs n ≥ 1".into()));
    }
    let f = move |_: &[T]| Ok(SymMatrix::identity(n));
    ChartManifold::new(
        format!("T{n}"),
        vec![T::zero(); n],
        vec![T::lit(2.0 * PI); n],
        MetricSource::Closure(Arc::new(f)),
    )
}

/// The flat torus as an abelian frame.
pub fn flat_torus_frame<T: Real>(n: usize) -> Result<FrameManifold<T>> {
    if n == 0 {
        return Err(Error::BadParams("flat_torus needs n ≥ 1".into()));
    }
    FrameManifold::new(format!("T{n}"), n, vec![T::zero(); n * n * n], SymMatrix::identity(n))
}

/// `S³` with `g(i, i) = ε`, `g(j, j) = g(k, k) = 1` in the left-invariant
/// frame: the Hopf fibers scaled by `√ε`.
pub fn berger_sphere<T: Real>(eps: f64) -> Result<FrameManifold<T>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::BadParams(format!("berger_sphere needs ε > 0, got {eps}")));
    }
    let q = SymMatrix::from_fn(3, |i, j| {
        if i != j {
            T::zero()
        } else if i == 0 {
            T::lit(eps)
        } else {
            T::one()
        }
    });
    FrameManifold::s3(format!("Berger({eps})"), q)
}

/// Riemannian product on the concatenated box.
pub fn product<T: Real>(m1: &ChartManifold<T>, m2: &ChartManifold<T>) -> Result<ChartManifold<T>> {
    let (n1, n2) = (m1.dim(), m2.dim());
    let n = n1 + n2;
    let name = format!("{}x{}", m1.name, m2.name);
    let lo = [m1.lo.clone(), m2.lo.clone()].concat();
    let hi = [m1.hi.clone(), m2.hi.clone()].concat();
    let source = match (&m1.source, &m2.source) {
        (MetricSource::Exprs(a), MetricSource::Exprs(b)) => {
            let (mut ia, mut ib) = (a.iter(), b.iter());
            let mut comps = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in i..n {
                    let e = if j < n1 {
                        ia.next().cloned()
                    } else if i >= n1 {
                        ib.next().map(|e| e.remap(&|v| v + n1))
                    } else {
                        Some(Expr::num(0.0))
                    };
                    comps.push(e.ok_or_else(|| Error::InvalidSpec("metric component count".into()))?);
                }
            }
            MetricSource::Exprs(comps)
        }
        _ => {
            let (a, b) = (m1.clone(), m2.clone());
            let f = move |p: &[T]| -> Result<SymMatrix<T>> {
                let (ga, gb) = (a.metric(&p[..n1])?, b.metric(&p[n1..])?);
                Ok(SymMatrix::from_fn(n, |i, j| {
                    if i < n1 && j < n1 {
                        ga.get(i, j)
                    } else if i >= n1 && j >= n1 {
                        gb.get(i - n1, j - n1)
                    } else {
                        T::zero()
                    }
                }))
            };
            MetricSource::Closure(Arc::new(f))
        }
    };
    let mut out = ChartManifold::new(name, lo, hi, source)?;
    out.margin = m1.margin.max(m2.margin);
    Ok(out)
}

/// `M₁ × M₂ → M₁`, projection onto the first factor.
pub fn product_submersion<T: Real>(m1: &ChartManifold<T>, m2: &ChartManifold<T>) -> Result<NumericSubmersion<T>> {
    let total = product(m1, m2)?;
    let proj = (0..m1.dim()).map(Expr::var).collect();
    NumericSubmersion::new(format!("{}->{}", total.name, m1.name), total, m1.clone(), proj)
}

/// A builtin name with arguments, written `name(arg, …)`; arguments are
/// numbers or nested builtins.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinSpec {
    pub name: String,
    pub args: Vec<BuiltinArg>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinArg {
    Num(f64),
    Space(BuiltinSpec),
}

impl fmt::Display for BuiltinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match a {
                BuiltinArg::Num(v) => write!(f, "{v}")?,
                BuiltinArg::Space(s) => write!(f, "{s}")?,
            }
        }
        f.write_str(")")
    }
}

impl FromStr for BuiltinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = SpecParser { s: s.as_bytes(), pos: 0 };
        let spec = p.spec()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(Error::BadParams(format!("trailing input in builtin spec {s:?}")));
        }
        Ok(spec)
    }
}

struct SpecParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl SpecParser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.pos < self.s.len() && f(self.s[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn bad(&self, what: &str) -> Error {
        Error::BadParams(format!("{what} at offset {} of builtin spec", self.pos))
    }

    fn spec(&mut self) -> Result<BuiltinSpec> {
        self.ws();
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_').to_string();
        if name.is_empty() {
            return Err(self.bad("expected a name"));
        }
        self.ws();
        let mut args = Vec::new();
        if self.s.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            loop {
                self.ws();
                if self.s.get(self.pos) == Some(&b')') && args.is_empty() {
                    self.pos += 1;
                    break;
                }
                args.push(self.arg()?);
                self.ws();
                match self.s.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.bad("expected ',' or ')'")),
                }
            }
        }
        Ok(BuiltinSpec { name, args })
    }

    fn arg(&mut self) -> Result<BuiltinArg> {
        match self.s.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => Ok(BuiltinArg::Space(self.spec()?)),
            _ => {
                let tok = self.take_while(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'));
                tok.parse()
                    .map(BuiltinArg::Num)
                    .map_err(|_| self.bad("expected a number"))
            }
        }
    }
}

/// What a builtin name resolves to.
#[derive(Debug, Clone)]
pub enum Builtin<T> {
    Manifold(ManifoldRep<T>),
    Submersion(NumericSubmersion<T>),
    ClosedForm(ClosedFormSubmersionData<T>),
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "round_sphere",
    "flat_torus",
    "berger_sphere",
    "hopf_s3_s2",
    "hopf_s7_s4",
    "product",
    "product_submersion",
];

fn nums(name: &str, args: &[BuiltinArg], expected: usize) -> Result<Vec<f64>> {
    if args.len() != expected {
        return Err(Error::BadParams(format!("{name} takes {expected} arguments, got {}", args.len())));
    }
    args.iter()
        .map(|a| match a {
            BuiltinArg::Num(v) => Ok(*v),
            BuiltinArg::Space(s) => Err(Error::BadParams(format!("{name}: expected a number, got {s}"))),
        })
        .collect()
}

fn count(name: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 64.0 {
        Ok(v as usize)
    } else {
        Err(Error::BadParams(format!("{name}: dimension must be a positive integer, got {v}")))
    }
}

fn chart_arg<T: Real>(name: &str, a: &BuiltinArg) -> Result<ChartManifold<T>> {
    let BuiltinArg::Space(s) = a else {
        return Err(Error::BadParams(format!("{name}: expected a manifold argument")));
    };
    match builtin(&s.name, &s.args)? {
        Builtin::Manifold(ManifoldRep::Chart(c)) => Ok(c),
        _ => Err(Error::BadParams(format!("{name}: factor {s} is not a chart manifold"))),
    }
}

/// Resolves a builtin by name. `hopf_*` yield closed-form data (with the
/// numeric submersion available through [`super::hopf_s3_s2`] etc.);
/// `product_submersion` the projection to the first factor.
pub fn builtin<T: Real>(name: &str, args: &[BuiltinArg]) -> Result<Builtin<T>> {
    Ok(match name {
        "round_sphere" => {
            let a = nums(name, args, 2)?;
            Builtin::Manifold(round_sphere(count(name, a[0])?, a[1])?.into())
        }
        "flat_torus" => {
            let a = nums(name, args, 1)?;
            Builtin::Manifold(flat_torus(count(name, a[0])?)?.into())
        }
        "berger_sphere" => {
            let a = nums(name, args, 1)?;
            Builtin::Manifold(berger_sphere(a[0])?.into())
        }
        "hopf_s3_s2" => {
            nums(name, args, 0)?;
            Builtin::ClosedForm(hopf_s3_s2()?.closed)
        }
        "hopf_s7_s4" => {
            nums(name, args, 0)?;
            Builtin::ClosedForm(hopf_s7_s4()?.closed)
        }
        "product" | "product_submersion" => {
            if args.len() != 2 {
                return Err(Error::BadParams(format!("{name} takes 2 manifolds, got {} arguments", args.len())));
            }
            let (m1, m2) = (chart_arg(name, &args[0])?, chart_arg(name, &args[1])?);
            if name == "product" {
                Builtin::Manifold(product(&m1, &m2)?.into())
            } else {
                Builtin::Submersion(product_submersion(&m1, &m2)?)
            }
        }
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    })
}

/// [`builtin`] on a spec string such as `product(round_sphere(2, 1), flat_torus(1))`.
pub fn builtin_from_str<T: Real>(spec: &str) -> Result<Builtin<T>> {
    let s: BuiltinSpec = spec.parse()?;
    builtin(&s.name, &s.args)
}
