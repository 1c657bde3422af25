//! Job configuration read from a TOML document.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use toml::Spanned;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Curvature,
    Certify,
    VariationScan,
    WarpShift,
    SolitonCheck,
    DwRoot,
    CatalogVerify,
}

impl JobKind {
    pub const ALL: [JobKind; 7] = [
        JobKind::Curvature,
        JobKind::Certify,
        JobKind::VariationScan,
        JobKind::WarpShift,
        JobKind::SolitonCheck,
        JobKind::DwRoot,
        JobKind::CatalogVerify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JobKind::Curvature => "curvature",
            JobKind::Certify => "certify",
            JobKind::VariationScan => "variation-scan",
            JobKind::WarpShift => "warp-shift",
            JobKind::SolitonCheck => "soliton-check",
            JobKind::DwRoot => "dw-root",
            JobKind::CatalogVerify => "catalog-verify",
        }
    }
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JobKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        JobKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown job `{s}`"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Must match the job given on the command line when present.
    pub job: Option<Spanned<String>>,
    pub seed: Option<u64>,
    pub manifold: Option<ManifoldConfig>,
    pub submersion: Option<SubmersionConfig>,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub curvature: Option<CurvatureConfig>,
    pub certify: Option<CertifyConfig>,
    pub variation: Option<VariationConfig>,
    pub warp: Option<WarpConfig>,
    pub soliton: Option<SolitonConfig>,
    pub dw: Option<DwConfig>,
    pub catalog: Option<CatalogConfig>,
}

/// Either `builtin = "round_sphere(2, 1)"` or an explicit chart.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub builtin: Option<Spanned<String>>,
    pub name: Option<String>,
    pub coords: Option<Vec<String>>,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    /// Packed upper triangle in row order, or the full matrix.
    pub metric: Option<Vec<Spanned<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmersionConfig {
    pub builtin: Option<Spanned<String>>,
    /// For the Hopf builtins: sample the numeric submersion instead of the
    /// homogeneous closed-form data.
    #[serde(default)]
    pub numeric: bool,
    pub total: Option<ManifoldConfig>,
    pub base: Option<ManifoldConfig>,
    /// Components of the projection in the total chart's coordinates.
    pub projection: Option<Vec<Spanned<String>>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    /// Uniform points per axis.
    pub grid: Option<usize>,
    /// Halton point count; takes precedence over `grid`.
    pub halton: Option<usize>,
    pub jitter: Option<f64>,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    /// Explicit evaluation points; the sampler grid otherwise.
    pub points: Option<Vec<Vec<f64>>>,
}

/// `family` is a builtin spec with `$` standing for the parameter, e.g.
/// `berger_sphere($)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub family: Option<Spanned<String>>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationConfig {
    pub t_start: Option<f64>,
    pub delta: Option<f64>,
    pub max_steps: Option<usize>,
    pub x_samples: Option<usize>,
    pub v_samples: Option<usize>,
    /// `tilde-unit` (default) or `g-unit`.
    pub normalization: Option<Spanned<String>>,
    /// Extra values of `t` at which the discriminant sweep is reported.
    pub scan: Option<Vec<f64>>,
    /// Re-check `t*` with the eigenvalue certifier.
    pub confirm: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpConfig {
    pub base: ManifoldConfig,
    pub fiber: ManifoldConfig,
    /// In the base coordinates (`x1, x2, …` for builtins).
    pub f: Spanned<String>,
    pub a_start: Option<f64>,
    pub step: Option<f64>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonConfig {
    pub rho: f64,
    pub potential: Option<Spanned<String>>,
    pub field: Option<Vec<Spanned<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwConfig {
    pub n: Vec<u32>,
    pub p: Vec<Rational>,
    pub q: Vec<Rational>,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub tol: Option<f64>,
    pub panels: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogConfig {
    pub samples: Option<usize>,
    /// Factor count of the `Sp(2, m)` check.
    pub m: Option<usize>,
    pub freeness_samples: Option<usize>,
}

/// A real given as a number or as a string `"a/b"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rational(pub f64);

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Rational(v as f64)),
            Raw::Float(v) => Ok(Rational(v)),
            Raw::Text(s) => parse_rational(&s).map(Rational).map_err(de::Error::custom),
        }
    }
}

fn parse_rational(s: &str) -> Result<f64, String> {
    let bad = || format!("`{s}` is not a number or a fraction a/b");
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0.0 {
                return Err(format!("`{s}` has a zero denominator"));
            }
            Ok(a / b)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

/// A problem with the configuration, located in the source when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    /// Attaches the position of byte offset `at` in `src`.
    pub fn at(mut self, src: &str, at: usize) -> Self {
        let (line, column) = position(src, at);
        self.line = Some(line);
        self.column = Some(column);
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

/// One-based line and column of byte offset `at`.
pub fn position(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a configuration document.
pub fn parse_config(src: &str) -> Result<JobConfig, ConfigError> {
    let cfg: JobConfig = toml::from_str(src).map_err(|e| {
        let msg = e.message().to_string();
        match e.span() {
            Some(span) => ConfigError::new(msg).at(src, span.start),
            None => ConfigError::new(msg),
        }
    })?;
    if let Some(f) = &cfg.output.formats {
        for (i, x) in f.iter().enumerate() {
            if x != "json" && x != "csv" {
                return Err(ConfigError::new(format!("output.formats[{i}]: unknown format `{x}`")));
            }
        }
    }
    Ok(cfg)
}

/// The document as JSON with sorted keys, for the report echo.
pub fn echo(src: &str) -> serde_json::Value {
    toml::from_str::<toml::Value>(src)
        .ok()
        .and_then(|v| serde_json::to_value(v).ok())
        .unwrap_or(serde_json::Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config("job = \"certify\"\n[manifold]\nbuiltin = \"flat_torus(2)\"\nbogus = 1\n").unwrap_err();
        assert!(e.message.contains("bogus"), "{e}");
        assert_eq!(e.line, Some(4));
    }

    #[test]
    fn rationals() {
        let c = parse_config("[dw]\nn = [1, 1]\np = [1, \"3/2\"]\nq = [1.0, 1]\nkappa_lo = -1\nkappa_hi = 1\n").unwrap();
        let dw = c.dw.unwrap();
        assert_eq!(dw.p, vec![Rational(1.0), Rational(1.5)]);
        assert!(parse_config("[dw]\nn = [1]\np = [\"1/0\"]\nq = [1]\nkappa_lo = 0\nkappa_hi = 1\n").is_err());
    }

    #[test]
    fn job_names_round_trip() {
        for k in JobKind::ALL {
            assert_eq!(k.name().parse::<JobKind>().unwrap(), k);
        }
        assert!("nope".parse::<JobKind>().is_err());
    }

    #[test]
    fn positions() {
        assert_eq!(position("ab\ncd", 4), (2, 2));
        assert_eq!(position("x", 0), (1, 1));
    }
}
