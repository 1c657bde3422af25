//! Report assembly and emission as JSON and CSV.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "canvar";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-sample table; each row is point coordinates, direction coordinates
/// and one value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub point_cols: usize,
    pub direction_cols: usize,
    pub value_name: String,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(point_cols: usize, direction_cols: usize, value_name: &str) -> Self {
        Self {
            point_cols,
            direction_cols,
            value_name: value_name.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, point: &[f64], direction: &[f64], value: f64) {
        let mut row = Vec::with_capacity(point.len() + direction.len() + 1);
        row.extend_from_slice(point);
        row.extend_from_slice(direction);
        row.push(value);
        self.rows.push(row);
    }

    pub fn header(&self) -> Vec<String> {
        (0..self.point_cols)
            .map(|i| format!("p{i}"))
            .chain((0..self.direction_cols).map(|i| format!("d{i}")))
            .chain(std::iter::once(self.value_name.clone()))
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.header())?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub job: String,
    pub seed: u64,
    /// The configuration document as read.
    pub config: Value,
    /// Effective sampler and command-line overrides.
    pub settings: Value,
    pub verdict: String,
    pub exit_code: i32,
    pub results: Value,
    pub samples: usize,
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report {
    /// Serialized with sorted keys (the JSON map is ordered) and shortest
    /// round-trip floats.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn parse_formats(list: &[String]) -> Result<Vec<Format>, String> {
    list.iter()
        .flat_map(|s| s.split(','))
        .map(|s| match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`")),
        })
        .collect()
}

/// Writes `<job>.json` and `<job>.csv` into `dir`, or the JSON to stdout
/// when `dir` is `None`. Returns the paths written.
pub fn emit_report(
    report: &mut Report,
    table: &Table,
    dir: Option<&Path>,
    formats: &[Format],
) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let Some(dir) = dir else {
        if formats.contains(&Format::Json) {
            print!("{}", report.to_json());
        }
        return Ok(written);
    };
    fs::create_dir_all(dir)?;
    if formats.contains(&Format::Csv) {
        let p = dir.join(format!("{}.csv", report.job));
        table.write_csv(&p)?;
        report.csv = Some(p.display().to_string());
        written.push(p);
    }
    if formats.contains(&Format::Json) {
        let p = dir.join(format!("{}.json", report.job));
        fs::write(&p, report.to_json())?;
        written.push(p);
    }
    Ok(written)
}
