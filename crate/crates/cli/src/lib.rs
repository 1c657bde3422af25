//! Command-line front end: reads a TOML job description, runs it and writes
//! a JSON report and a CSV sample table.

pub mod config;
pub mod jobs;
pub mod report;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use config::{echo, parse_config, ConfigError, JobKind};
use jobs::{execute, settings, JobFailure, Outcome};
use report::{emit_report, parse_formats, Format, Report, Table, TOOL, VERSION};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "canvar", version, about = "Curvature, canonical variations and positive Ricci certification")]
pub struct Cli {
    /// curvature | certify | variation-scan | warp-shift | soliton-check | dw-root | catalog-verify
    pub job: JobKind,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Uniform grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub margin: Option<f64>,
    /// Output directory; the JSON report goes to stdout without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated list of json, csv.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<String>>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record wall time in the report. Off by default so reports are
    /// byte-reproducible.
    #[arg(long)]
    pub timing: bool,
}

fn color() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn diagnose(what: &str, msg: impl std::fmt::Display) {
    if color() {
        eprintln!("\x1b[1;31m{what}\x1b[0m: {msg}");
    } else {
        eprintln!("{what}: {msg}");
    }
}

fn config_error(cli: &Cli, e: ConfigError) -> i32 {
    diagnose("error", format!("{}:{e}", cli.config.display()));
    EXIT_CONFIG
}

/// Runs one job and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let src = match std::fs::read_to_string(&cli.config) {
        Ok(s) => s,
        Err(e) => return config_error(cli, ConfigError::new(format!("cannot read config: {e}"))),
    };
    let cfg = match parse_config(&src) {
        Ok(c) => c,
        Err(e) => return config_error(cli, e),
    };
    if let Some(j) = &cfg.job {
        if j.get_ref() != cli.job.name() {
            let e = ConfigError::new(format!("job: config is for `{}`, command line asks for `{}`", j.get_ref(), cli.job));
            return config_error(cli, e.at(&src, j.span().start));
        }
    }
    let formats = match cli.format.as_ref().or(cfg.output.formats.as_ref()) {
        Some(f) => match parse_formats(f) {
            Ok(f) => f,
            Err(e) => return config_error(cli, ConfigError::new(e)),
        },
        None => vec![Format::Json, Format::Csv],
    };
    if let Some(n) = cli.threads {
        // fails only if a pool already exists in this process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let s = settings(&cfg, cli.seed, cli.grid, cli.margin);
    let start = Instant::now();
    let (outcome, results, table) = match execute(cli.job, &cfg, &src, &s) {
        Ok(o) => (o.outcome, o.results, o.table),
        Err(JobFailure::Config(e)) => return config_error(cli, e),
        Err(JobFailure::Numeric(msg)) => {
            diagnose("numeric error", &msg);
            (Outcome::Error, serde_json::json!({ "error": msg }), Table::default())
        }
    };
    let mut report = Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        job: cli.job.name().into(),
        seed: s.seed,
        config: echo(&src),
        settings: s.describe(),
        verdict: outcome.name().into(),
        exit_code: outcome.exit_code(),
        results,
        samples: table.rows.len(),
        csv: None,
        wall_time: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let out = cli.out.clone().or_else(|| cfg.output.dir.clone().map(PathBuf::from));
    match emit_report(&mut report, &table, out.as_deref(), &formats) {
        Ok(paths) => {
            let line = format!("{} {}: {} ({} samples)", TOOL, report.job, report.verdict, report.samples);
            if paths.is_empty() {
                eprintln!("{line}");
            } else {
                println!("{line}");
                for p in paths {
                    println!("  wrote {}", p.display());
                }
            }
            report.exit_code
        }
        Err(e) => {
            diagnose("error", format!("writing report: {e}"));
            EXIT_NUMERIC
        }
    }
}
