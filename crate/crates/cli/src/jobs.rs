//! Building computations from a configuration and running them.

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use toml::Spanned;

use canvar::catalog::{
    bullet_action, builtin_from_str, freeness_check, h, h_tilde, hopf_s3_s2, hopf_s7_s4, random_s7, random_sp2_from,
    random_unit_quat, star_action, wilhelm_action, Builtin, Sp2mElement,
};
use canvar::certifier::{
    certify_positivity, discriminant_scan, find_certifying_t, positivity_threshold, CertSource, CertificationReport,
    DiscriminantReport, Normalization, SearchOptions, Verdict, DEFAULT_MARGIN,
};
use canvar::dsl::{parse, Expr};
use canvar::geometry::{ChartManifold, GridSpec, ManifoldRep};
use canvar::numerics::seeded_rng;
use canvar::soliton::{
    classify, dw_find_root_with, dw_integral_with, residual_at, DWIntegralSpec, SolitonData, SolitonField, SolitonKind,
    DEFAULT_PANELS, SWEEP_POINTS,
};
use canvar::submersion::NumericSubmersion;
use canvar::warped::{find_shift, mixed_block_residual, ShiftSchedule, WarpedProduct};
use canvar::{Error, Manifold};

use crate::config::{ConfigError, JobConfig, JobKind, ManifoldConfig, SubmersionConfig};
use crate::report::Table;

/// Tolerance of the soliton verdict.
pub const SOLITON_TOL: f64 = 1e-8;
/// Tolerance of the quaternionic relations.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance of `|h(u)|² = 1`.
pub const SPHERE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Positive,
    Violated,
    NotFound,
    HypothesisViolated,
    NoSignChange,
    Error,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Positive => "positive",
            Outcome::Violated => "violated",
            Outcome::NotFound => "not_found",
            Outcome::HypothesisViolated => "hypothesis_violated",
            Outcome::NoSignChange => "no_sign_change",
            Outcome::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success | Outcome::Positive => 0,
            Outcome::Violated | Outcome::NotFound | Outcome::HypothesisViolated | Outcome::NoSignChange => 1,
            Outcome::Error => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JobOutput {
    pub outcome: Outcome,
    pub results: Value,
    pub table: Table,
}

#[derive(Debug, Clone)]
pub enum JobFailure {
    Config(ConfigError),
    Numeric(String),
}

impl From<ConfigError> for JobFailure {
    fn from(e: ConfigError) -> Self {
        JobFailure::Config(e)
    }
}

type JobResult<T> = Result<T, JobFailure>;

fn numeric(e: Error) -> JobFailure {
    JobFailure::Numeric(e.to_string())
}

/// Sampler and seed after command-line overrides.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub grid: GridSpec,
    pub margin: f64,
}

impl Settings {
    pub fn describe(&self) -> Value {
        json!({ "grid": self.grid.describe(), "margin": self.margin, "seed": self.seed })
    }
}

pub fn settings(cfg: &JobConfig, seed: Option<u64>, grid: Option<usize>, margin: Option<f64>) -> Settings {
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let s = &cfg.sampler;
    let mut g = match (grid, s.halton) {
        (Some(n), _) => GridSpec::uniform(n),
        (None, Some(c)) => GridSpec::halton(c, seed),
        (None, None) => GridSpec::uniform(s.grid.unwrap_or(3)),
    };
    if let Some(j) = s.jitter {
        g = g.with_jitter(j, seed);
    }
    Settings {
        seed,
        grid: g,
        margin: margin.or(s.margin).unwrap_or(DEFAULT_MARGIN),
    }
}

/// Runs the job on a parsed configuration; `src` is the document text for
/// error positions.
pub fn execute(kind: JobKind, cfg: &JobConfig, src: &str, s: &Settings) -> JobResult<JobOutput> {
    let ctx = Ctx { src };
    match kind {
        JobKind::Curvature => curvature(&ctx, cfg, s),
        JobKind::Certify => certify(&ctx, cfg, s),
        JobKind::VariationScan => variation_scan(&ctx, cfg, s),
        JobKind::WarpShift => warp_shift(&ctx, cfg, s),
        JobKind::SolitonCheck => soliton_check(&ctx, cfg, s),
        JobKind::DwRoot => dw_root(cfg),
        JobKind::CatalogVerify => catalog_verify(cfg, s),
    }
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn err_at<T>(&self, key: &str, v: &Spanned<T>, msg: impl std::fmt::Display) -> JobFailure {
        JobFailure::Config(ConfigError::new(format!("{key}: {msg}")).at(self.src, v.span().start))
    }
}

fn missing(key: &str) -> JobFailure {
    JobFailure::Config(ConfigError::new(format!("missing `{key}`")))
}

fn bad(key: &str, e: impl std::fmt::Display) -> JobFailure {
    JobFailure::Config(ConfigError::new(format!("{key}: {e}")))
}

/// A manifold and the coordinate names expressions may use.
struct Space {
    rep: Manifold,
    names: Vec<String>,
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn manifold(ctx: &Ctx, m: &ManifoldConfig, key: &str) -> JobResult<Space> {
    if let Some(b) = &m.builtin {
        return match builtin_from_str::<f64>(b.get_ref()) {
            Ok(Builtin::Manifold(rep)) => {
                let names = default_names(rep.dim());
                Ok(Space { rep, names })
            }
            Ok(_) => Err(ctx.err_at(&format!("{key}.builtin"), b, "names a submersion, not a manifold")),
            Err(e) => Err(ctx.err_at(&format!("{key}.builtin"), b, e)),
        };
    }
    let coords = m.coords.as_ref().ok_or_else(|| missing(&format!("{key}.coords")))?;
    let lo = m.lo.clone().ok_or_else(|| missing(&format!("{key}.lo")))?;
    let hi = m.hi.clone().ok_or_else(|| missing(&format!("{key}.hi")))?;
    let metric = m.metric.as_ref().ok_or_else(|| missing(&format!("{key}.metric")))?;
    let names: Vec<&str> = coords.iter().map(String::as_str).collect();
    if lo.len() != names.len() || hi.len() != names.len() {
        return Err(bad(key, format!("coords, lo and hi need equal lengths ({}, {}, {})", names.len(), lo.len(), hi.len())));
    }
    for (i, c) in metric.iter().enumerate() {
        if let Err(e) = parse(c.get_ref(), &names) {
            return Err(ctx.err_at(&format!("{key}.metric[{i}]"), c, e));
        }
    }
    let comps: Vec<&str> = metric.iter().map(|c| c.get_ref().as_str()).collect();
    let name = m.name.clone().unwrap_or_else(|| "chart".into());
    let chart = ChartManifold::from_strings(name, &names, lo, hi, &comps).map_err(|e| bad(key, e))?;
    Ok(Space {
        rep: chart.into(),
        names: coords.clone(),
    })
}

fn chart_space(ctx: &Ctx, m: &ManifoldConfig, key: &str) -> JobResult<(ChartManifold<f64>, Vec<String>)> {
    let s = manifold(ctx, m, key)?;
    match s.rep {
        ManifoldRep::Chart(c) => Ok((c, s.names)),
        ManifoldRep::Frame(_) => Err(bad(key, "needs a chart manifold, got a frame manifold")),
    }
}

fn expr(ctx: &Ctx, key: &str, e: &Spanned<String>, names: &[String]) -> JobResult<Expr> {
    let n: Vec<&str> = names.iter().map(String::as_str).collect();
    parse(e.get_ref(), &n).map_err(|err| ctx.err_at(key, e, err))
}

fn require_manifold(cfg: &JobConfig) -> JobResult<&ManifoldConfig> {
    cfg.manifold.as_ref().ok_or_else(|| missing("[manifold]"))
}

fn point_summary(r: &CertificationReport) -> Value {
    json!({
        "grid": r.grid,
        "margin": r.margin,
        "min_eig": r.min_eig,
        "parameter": r.parameter,
        "points": r.points,
        "verdict": verdict_name(r.verdict),
        "witness": r.witness,
    })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "positive",
        Verdict::Violated => "violated",
    }
}

fn cert_table(r: &CertificationReport) -> Table {
    let n = r.samples.first().map_or(0, |(p, _)| p.len());
    let mut t = Table::new(n, 0, "min_ricci_eig");
    for (p, e) in &r.samples {
        t.push(p, &[], *e);
    }
    t
}

fn curvature(ctx: &Ctx, cfg: &JobConfig, s: &Settings) -> JobResult<JobOutput> {
    let space = manifold(ctx, require_manifold(cfg)?, "manifold")?;
    let m = &space.rep;
    let points = match cfg.curvature.as_ref().and_then(|c| c.points.clone()) {
        Some(p) => {
            if let Some(bad_p) = p.iter().find(|p| p.len() != m.point_dim()) {
                return Err(bad("curvature.points", format!("{bad_p:?} does not have {} coordinates", m.point_dim())));
            }
            p
        }
        None => m.sample_points(&s.grid),
    };
    let eigs: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| m.curvature(p)?.ricci_eigenvalues())
        .collect::<Result<_, Error>>()
        .map_err(numeric)?;
    let mut t = Table::new(m.point_dim(), 0, "min_ricci_eig");
    let (mut lo, mut hi, mut at) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    let (mut s_lo, mut s_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, (p, e)) in points.iter().zip(&eigs).enumerate() {
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scalar: f64 = e.iter().sum();
        if min < lo {
            lo = min;
            at = i;
        }
        hi = hi.max(max);
        s_lo = s_lo.min(scalar);
        s_hi = s_hi.max(scalar);
        t.push(p, &[], min);
    }
    Ok(JobOutput {
        outcome: Outcome::Success,
        results: json!({
            "dim": m.dim(),
            "manifold": m.name(),
            "max_ricci_eig": hi,
            "min_ricci_eig": lo,
            "points": points.len(),
            "ricci_eigenvalues_at_witness": eigs.get(at),
            "scalar_range": [s_lo, s_hi],
            "witness": points.get(at),
        }),
        table: t,
    })
}

fn certify(ctx: &Ctx, cfg: &JobConfig, s: &Settings) -> JobResult<JobOutput> {
    if let Some(c) = &cfg.certify {
        if let Some(fam) = &c.family {
            return threshold(ctx, fam, c.lo, c.hi, c.tol.unwrap_or(1e-3), s);
        }
    }
    let space = manifold(ctx, require_manifold(cfg)?, "manifold")?;
    let r = certify_positivity(&space.rep, &s.grid, s.margin).map_err(numeric)?;
    Ok(JobOutput {
        outcome: if r.verdict == Verdict::Positive { Outcome::Positive } else { Outcome::Violated },
        results: json!({ "certification": point_summary(&r), "manifold": space.rep.name() }),
        table: cert_table(&r),
    })
}

fn threshold(ctx: &Ctx, fam: &Spanned<String>, lo: Option<f64>, hi: Option<f64>, tol: f64, s: &Settings) -> JobResult<JobOutput> {
    let template = fam.get_ref();
    if !template.contains('$') {
        return Err(ctx.err_at("certify.family", fam, "needs `$` for the parameter"));
    }
    let (lo, hi) = (lo.ok_or_else(|| missing("certify.lo"))?, hi.ok_or_else(|| missing("certify.hi"))?);
    let build = |v: f64| -> Result<Manifold, Error> {
        match builtin_from_str::<f64>(&template.replace('$', &format!("{v:?}")))? {
            Builtin::Manifold(m) => Ok(m),
            _ => Err(Error::BadParams(format!("{template} is not a manifold family"))),
        }
    };
    for v in [lo, hi] {
        build(v).map_err(|e| ctx.err_at("certify.family", fam, e))?;
    }
    match positivity_threshold(build, lo, hi, tol, &s.grid, s.margin) {
        Ok(x) => {
            let at_lo = certify_positivity(&build(lo).map_err(numeric)?, &s.grid, s.margin).map_err(numeric)?;
            let at_hi = certify_positivity(&build(hi).map_err(numeric)?, &s.grid, s.margin).map_err(numeric)?;
            let mut table = cert_table(&at_lo);
            table.rows.extend(cert_table(&at_hi).rows);
            Ok(JobOutput {
                outcome: Outcome::Success,
                results: json!({
                    "bracket": [lo, hi],
                    "family": template,
                    "threshold": x,
                    "tol": tol,
                    "verdict_hi": verdict_name(at_hi.verdict),
                    "verdict_lo": verdict_name(at_lo.verdict),
                }),
                table,
            })
        }
        Err(Error::SameSign) => Ok(JobOutput {
            outcome: Outcome::NotFound,
            results: json!({ "bracket": [lo, hi], "family": template, "reason": Error::SameSign.to_string() }),
            table: Table::new(0, 0, "min_ricci_eig"),
        }),
        Err(e) => Err(numeric(e)),
    }
}

fn submersion_source(ctx: &Ctx, c: &SubmersionConfig, s: &Settings) -> JobResult<(String, CertSource<f64>)> {
    if let Some(b) = &c.builtin {
        let name = b.get_ref().trim();
        let numeric_hopf = |m: Result<canvar::catalog::HopfModel<f64>, Error>| -> JobResult<CertSource<f64>> {
            Ok(CertSource::Numeric {
                submersion: m.map_err(numeric)?.numeric,
                grid: s.grid,
            })
        };
        let src = match (name, c.numeric) {
            ("hopf_s3_s2", true) => numeric_hopf(hopf_s3_s2())?,
            ("hopf_s7_s4", true) => numeric_hopf(hopf_s7_s4())?,
            _ => match builtin_from_str::<f64>(name) {
                Ok(Builtin::ClosedForm(d)) => CertSource::Closed(d),
                Ok(Builtin::Submersion(sub)) => CertSource::Numeric {
                    submersion: sub,
                    grid: s.grid,
                },
                Ok(Builtin::Manifold(_)) => return Err(ctx.err_at("submersion.builtin", b, "names a manifold, not a submersion")),
                Err(e) => return Err(ctx.err_at("submersion.builtin", b, e)),
            },
        };
        return Ok((name.to_string(), src));
    }
    let total = c.total.as_ref().ok_or_else(|| missing("submersion.total"))?;
    let base = c.base.as_ref().ok_or_else(|| missing("submersion.base"))?;
    let (total, names) = chart_space(ctx, total, "submersion.total")?;
    let (base, _) = chart_space(ctx, base, "submersion.base")?;
    let proj = c.projection.as_ref().ok_or_else(|| missing("submersion.projection"))?;
    let exprs = proj
        .iter()
        .enumerate()
        .map(|(i, e)| expr(ctx, &format!("submersion.projection[{i}]"), e, &names))
        .collect::<JobResult<Vec<_>>>()?;
    let name = format!("{}->{}", total.name, base.name);
    let sub = NumericSubmersion::new(name.clone(), total, base, exprs).map_err(|e| bad("submersion", e))?;
    Ok((
        name,
        CertSource::Numeric {
            submersion: sub,
            grid: s.grid,
        },
    ))
}

fn scan_summary(r: &DiscriminantReport) -> Value {
    json!({
        "max_delta": r.max_delta,
        "min_c0": r.min_c0,
        "min_c2": r.min_c2,
        "samples": r.samples.len(),
        "t": r.t,
        "verdict": verdict_name(r.verdict),
    })
}

fn variation_scan(ctx: &Ctx, cfg: &JobConfig, s: &Settings) -> JobResult<JobOutput> {
    let sub = cfg.submersion.as_ref().ok_or_else(|| missing("[submersion]"))?;
    let (name, src) = submersion_source(ctx, sub, s)?;
    let v = cfg.variation.clone().unwrap_or_default();
    let d = SearchOptions::default();
    let normalization = match &v.normalization {
        None => Normalization::TildeUnit,
        Some(n) => match n.get_ref().as_str() {
            "tilde-unit" => Normalization::TildeUnit,
            "g-unit" => Normalization::GUnit,
            other => return Err(ctx.err_at("variation.normalization", n, format!("expected tilde-unit or g-unit, got `{other}`"))),
        },
    };
    let opts = SearchOptions {
        t_start: v.t_start.unwrap_or(d.t_start),
        delta: v.delta.unwrap_or(d.delta),
        max_steps: v.max_steps.unwrap_or(d.max_steps),
        margin: s.margin,
        x_samples: v.x_samples.unwrap_or(d.x_samples),
        v_samples: v.v_samples.unwrap_or(d.v_samples),
        seed: s.seed,
        normalization,
    };
    let hypothesis = |e: Error| match e {
        Error::HypothesisViolated(msg) => Ok(JobOutput {
            outcome: Outcome::HypothesisViolated,
            results: json!({ "reason": msg, "submersion": name }),
            table: Table::new(0, 0, "delta"),
        }),
        e => Err(numeric(e)),
    };
    let scans = match v.scan.as_deref() {
        Some(ts) if !ts.is_empty() => match discriminant_scan(&src, ts, &opts) {
            Ok(r) => r.iter().map(scan_summary).collect::<Vec<_>>(),
            Err(e) => return hypothesis(e),
        },
        _ => Vec::new(),
    };
    let search = json!({
        "delta": opts.delta,
        "max_steps": opts.max_steps,
        "normalization": if normalization == Normalization::GUnit { "g-unit" } else { "tilde-unit" },
        "t_start": opts.t_start,
        "v_samples": opts.v_samples,
        "x_samples": opts.x_samples,
    });
    let (t, report) = match find_certifying_t(&src, &opts) {
        Ok(r) => r,
        Err(Error::NotFound { iterations }) => {
            return Ok(JobOutput {
                outcome: Outcome::NotFound,
                results: json!({ "iterations": iterations, "scan": scans, "search": search, "submersion": name }),
                table: Table::new(0, 0, "delta"),
            })
        }
        Err(e) => return hypothesis(e),
    };
    let confirm = if v.confirm.unwrap_or(true) {
        let m = src.variation_manifold(t).map_err(numeric)?;
        Some(certify_positivity(&m, &s.grid, s.margin).map_err(numeric)?)
    } else {
        None
    };
    let outcome = match &confirm {
        Some(c) if c.verdict != Verdict::Positive => Outcome::Violated,
        _ => Outcome::Positive,
    };
    let first = report.samples.first();
    let mut table = Table::new(
        first.map_or(0, |x| x.point.len()),
        first.map_or(0, |x| x.x.len() + x.v.len()),
        "delta",
    );
    for x in &report.samples {
        let dir: Vec<f64> = x.x.iter().chain(&x.v).copied().collect();
        table.push(&x.point, &dir, x.delta);
    }
    let w = &report.samples[report.witness];
    Ok(JobOutput {
        outcome,
        results: json!({
            "certified": scan_summary(&report),
            "confirmation": confirm.as_ref().map(point_summary),
            "scan": scans,
            "search": search,
            "submersion": name,
            "t_star": t,
            "witness": { "c0": w.c0, "c1": w.c1, "c2": w.c2, "delta": w.delta, "point": w.point, "v": w.v, "x": w.x },
        }),
        table,
    })
}

fn warp_shift(ctx: &Ctx, cfg: &JobConfig, s: &Settings) -> JobResult<JobOutput> {
    let w = cfg.warp.as_ref().ok_or_else(|| missing("[warp]"))?;
    let (base, names) = chart_space(ctx, &w.base, "warp.base")?;
    let (fiber, _) = chart_space(ctx, &w.fiber, "warp.fiber")?;
    let f = expr(ctx, "warp.f", &w.f, &names)?;
    let d = ShiftSchedule::default();
    let sched = ShiftSchedule {
        a_start: w.a_start.unwrap_or(d.a_start),
        step: w.step.unwrap_or(d.step),
        max_steps: w.max_steps.unwrap_or(d.max_steps),
        margin: s.margin,
    };
    let wp = WarpedProduct::new(base, fiber, f, sched.a_start).map_err(|e| bad("warp", e))?;
    let schedule = json!({ "a_start": sched.a_start, "max_steps": sched.max_steps, "step": sched.step });
    let mixed_at = |a: f64| -> JobResult<f64> {
        let shifted = wp.with_shift(a);
        let (lo, hi) = shifted.chart().map_err(numeric)?.inner_box();
        mixed_block_residual(&shifted, &s.grid.points(&lo, &hi)).map_err(numeric)
    };
    match find_shift(&wp, &s.grid, &sched) {
        Ok((a, r)) => {
            let again = certify_positivity(&wp.with_shift(a + 1.0).chart().map_err(numeric)?.into(), &s.grid, s.margin).map_err(numeric)?;
            let outcome = if again.verdict == Verdict::Positive { Outcome::Positive } else { Outcome::Violated };
            Ok(JobOutput {
                outcome,
                results: json!({
                    "a_star": a,
                    "certification": point_summary(&r),
                    "mixed_block_residual": mixed_at(a)?,
                    "recheck_a_plus_1": point_summary(&again),
                    "schedule": schedule,
                }),
                table: cert_table(&r),
            })
        }
        Err(Error::NotFound { iterations }) => {
            let last = sched.a_start + (sched.max_steps.max(1) - 1) as f64 * sched.step;
            let r = certify_positivity(&wp.with_shift(last).chart().map_err(numeric)?.into(), &s.grid, s.margin).map_err(numeric)?;
            Ok(JobOutput {
                outcome: Outcome::NotFound,
                results: json!({
                    "iterations": iterations,
                    "last_attempt": point_summary(&r),
                    "mixed_block_residual": mixed_at(last)?,
                    "schedule": schedule,
                }),
                table: cert_table(&r),
            })
        }
        Err(Error::HypothesisViolated(msg)) => Ok(JobOutput {
            outcome: Outcome::HypothesisViolated,
            results: json!({ "reason": msg, "schedule": schedule }),
            table: Table::new(0, 0, "min_ricci_eig"),
        }),
        Err(e) => Err(numeric(e)),
    }
}

fn soliton_check(ctx: &Ctx, cfg: &JobConfig, s: &Settings) -> JobResult<JobOutput> {
    let sol = cfg.soliton.as_ref().ok_or_else(|| missing("[soliton]"))?;
    let (chart, names) = chart_space(ctx, require_manifold(cfg)?, "manifold")?;
    let field = match (&sol.potential, &sol.field) {
        (Some(p), None) => SolitonField::Potential(expr(ctx, "soliton.potential", p, &names)?),
        (None, Some(xs)) => SolitonField::Vector(
            xs.iter()
                .enumerate()
                .map(|(i, e)| expr(ctx, &format!("soliton.field[{i}]"), e, &names))
                .collect::<JobResult<_>>()?,
        ),
        (None, None) => return Err(missing("soliton.potential or soliton.field")),
        (Some(_), Some(_)) => return Err(bad("soliton", "give either potential or field, not both")),
    };
    let data = SolitonData::new(chart, field, sol.rho).map_err(|e| bad("soliton", e))?;
    let (lo, hi) = data.manifold.inner_box();
    let points = s.grid.points(&lo, &hi);
    let vals: Vec<f64> = points
        .par_iter()
        .map(|p| residual_at(&data, p))
        .collect::<Result<_, Error>>()
        .map_err(numeric)?;
    let mut table = Table::new(lo.len(), 0, "residual");
    let (mut worst, mut at) = (f64::NEG_INFINITY, 0);
    for (i, (p, v)) in points.iter().zip(&vals).enumerate() {
        if *v > worst || v.is_nan() {
            worst = *v;
            at = i;
        }
        table.push(p, &[], *v);
    }
    let kind = match classify(sol.rho) {
        SolitonKind::Steady => "steady",
        SolitonKind::Expanding => "expanding",
        SolitonKind::Shrinking => "shrinking",
    };
    Ok(JobOutput {
        outcome: if worst <= SOLITON_TOL { Outcome::Success } else { Outcome::Violated },
        results: json!({
            "kind": kind,
            "max_residual": worst,
            "points": points.len(),
            "rho": sol.rho,
            "tolerance": SOLITON_TOL,
            "witness": points.get(at),
        }),
        table,
    })
}

fn dw_root(cfg: &JobConfig) -> JobResult<JobOutput> {
    let c = cfg.dw.as_ref().ok_or_else(|| missing("[dw]"))?;
    let spec = DWIntegralSpec::new(
        c.n.clone(),
        c.p.iter().map(|r| r.0).collect(),
        c.q.iter().map(|r| r.0).collect(),
        0.0,
    )
    .map_err(|e| bad("dw", e))?;
    if !(c.kappa_lo < c.kappa_hi) {
        return Err(bad("dw", "kappa_lo must be below kappa_hi"));
    }
    let tol = c.tol.unwrap_or(1e-13);
    let panels = c.panels.unwrap_or(DEFAULT_PANELS);
    let at_zero = dw_integral_with(&spec, panels).map_err(numeric)?;
    let step = (c.kappa_hi - c.kappa_lo) / (SWEEP_POINTS - 1) as f64;
    let ks: Vec<f64> = (0..SWEEP_POINTS).map(|i| c.kappa_lo + step * i as f64).collect();
    let sweep: Vec<f64> = ks
        .par_iter()
        .map(|&k| dw_integral_with(&spec.with_kappa(k), panels))
        .collect::<Result<_, Error>>()
        .map_err(numeric)?;
    let mut table = Table::new(1, 0, "integral");
    for (k, v) in ks.iter().zip(&sweep) {
        table.push(&[*k], &[], *v);
    }
    let base = json!({
        "integral_at_zero": at_zero,
        "interval": [spec.interval().0, spec.interval().1],
        "panels": panels,
        "tol": tol,
        "warnings": spec.warnings(),
    });
    let roots = match dw_find_root_with(&spec, c.kappa_lo, c.kappa_hi, tol, panels) {
        Ok(r) => r,
        Err(e @ Error::NoSignChange { .. }) => {
            let mut results = base;
            results["reason"] = json!(e.to_string());
            return Ok(JobOutput {
                outcome: Outcome::NoSignChange,
                results,
                table,
            });
        }
        Err(e) => return Err(numeric(e)),
    };
    let fine = dw_find_root_with(&spec, c.kappa_lo, c.kappa_hi, tol, 2 * panels).map_err(numeric)?;
    let list: Vec<Value> = roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "kappa1": r.kappa1,
                "non_einstein": r.non_einstein,
                "refinement_shift": fine.get(i).map(|f| (f.kappa1 - r.kappa1).abs()),
                "residual": r.residual,
                "scale": r.scale,
            })
        })
        .collect();
    let mut results = base;
    results["roots"] = json!(list);
    Ok(JobOutput {
        outcome: Outcome::Success,
        results,
        table,
    })
}

fn catalog_verify(cfg: &JobConfig, s: &Settings) -> JobResult<JobOutput> {
    let c = cfg.catalog.clone().unwrap_or_default();
    let n = c.samples.unwrap_or(1000);
    let m = c.m.unwrap_or(3);
    if m < 2 {
        return Err(bad("catalog.m", "needs m ≥ 2"));
    }
    let mut rng = seeded_rng(s.seed);
    // a failed action reports the residual it rejected
    let residual = |r: Result<f64, Error>| match r {
        Ok(v) => v,
        Err(Error::ConstraintViolated { residual }) => residual,
        Err(_) => f64::INFINITY,
    };
    let mut worst = [0.0f64; 6];
    let mut table = Table::new(1, 0, "max_residual");
    for i in 0..n {
        let e = random_sp2_from::<f64>(&mut rng);
        let (q1, q2) = (random_unit_quat::<f64>(&mut rng), random_unit_quat::<f64>(&mut rng));
        let sp2 = e.constraint_residual();
        let comm = residual((|| Ok(bullet_action(q1, &star_action(q2, &e)?)?.dist(&star_action(q2, &bullet_action(q1, &e)?)?)))());
        let kept = residual((|| {
            Ok(bullet_action(q1, &e)?
                .constraint_residual()
                .max(star_action(q2, &e)?.constraint_residual()))
        })());
        let u = random_s7::<f64>(&mut rng);
        let sphere = residual((|| Ok((h(&u)?.norm_sqr() - 1.0).abs().max((h_tilde(&u)?.norm_sqr() - 1.0).abs())))());
        let w_seed: u64 = rng.gen();
        let qs: Vec<_> = (0..m).map(|_| random_unit_quat::<f64>(&mut rng)).collect();
        let (w_in, w_out) = match Sp2mElement::<f64>::random(m, w_seed) {
            Ok(w) => (
                residual(w.constraint_residual()),
                residual((|| wilhelm_action(&qs, &w)?.constraint_residual())()),
            ),
            Err(_) => (f64::INFINITY, f64::INFINITY),
        };
        let row = [sp2, comm, kept, sphere, w_in, w_out];
        for (a, b) in worst.iter_mut().zip(row) {
            *a = a.max(b);
        }
        table.push(&[i as f64], &[], row.into_iter().fold(0.0, f64::max));
    }
    let free = freeness_check(c.freeness_samples.unwrap_or(10_000), s.seed).map_err(numeric)?;
    let algebra_ok = [worst[0], worst[1], worst[2], worst[4], worst[5]].iter().all(|v| *v <= ALGEBRA_TOL);
    let free_ok = [free.bullet_min_ratio, free.star_min_ratio, free.wilhelm_min_ratio]
        .iter()
        .all(|r| *r > 0.0);
    let ok = algebra_ok && worst[3] <= SPHERE_TOL && free_ok;
    Ok(JobOutput {
        outcome: if ok { Outcome::Positive } else { Outcome::Violated },
        results: json!({
            "algebra_tol": ALGEBRA_TOL,
            "commutation": worst[1],
            "freeness": {
                "bullet_min_ratio": free.bullet_min_ratio,
                "samples": free.samples,
                "star_min_ratio": free.star_min_ratio,
                "wilhelm_min_ratio": free.wilhelm_min_ratio,
            },
            "m": m,
            "preservation": worst[2],
            "samples": n,
            "sp2_constraints": worst[0],
            "sp2m_constraints": worst[4],
            "sphere": worst[3],
            "sphere_tol": SPHERE_TOL,
            "wilhelm_preservation": worst[5],
        }),
        table,
    })
}
