//! Report records and their JSON / CSV serializations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// How a check compares its deviation with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Pass when `deviation <= tolerance`.
    AtMost,
    /// Pass when `deviation >= tolerance`.
    AtLeast,
}

/// One pass/fail outcome with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The measured quantity (slope, rate, norm, ...).
    pub value: f64,
    pub target: Option<f64>,
    /// The quantity compared with `tolerance`.
    pub deviation: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, target: Option<f64>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target,
            deviation,
            tolerance,
            relation: Relation::AtMost,
            // NaN deviations fail
            pass: deviation <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, target: Option<f64>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target,
            deviation,
            tolerance,
            relation: Relation::AtLeast,
            pass: deviation >= tolerance,
        }
    }

    /// `|value - target| / |target| <= tolerance`.
    pub fn relative(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let deviation = (value - target).abs() / target.abs();
        Check::at_most(name, value, Some(target), deviation, tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Info {
    pub name: String,
    pub value: f64,
}

/// A figure-able series; the first column is the independent variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Series {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Results of one case of a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ExperimentReport {
    /// Unique within the record; also the CSV file stem.
    pub id: String,
    pub parameters: serde_json::Value,
    pub checks: Vec<Check>,
    /// Informational numbers with no pass/fail attached.
    pub info: Vec<Info>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub series: Vec<Series>,
}

impl ExperimentReport {
    pub fn new(id: impl Into<String>, parameters: serde_json::Value) -> Self {
        ExperimentReport {
            id: id.into(),
            parameters,
            ..Default::default()
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.info.push(Info { name: name.into(), value });
    }

    /// Records a warning unless an identical one is already present.
    pub fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    /// SHA-256 of the manifest bytes, hex encoded.
    pub manifest_hash: String,
    pub version: String,
    pub kind: String,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub passed: bool,
    pub experiments: Vec<ExperimentReport>,
    /// Warnings that belong to the run rather than to one experiment.
    pub warnings: Vec<String>,
}

impl ReportRecord {
    pub fn all_passed(&self) -> bool {
        self.experiments.iter().all(ExperimentReport::passed)
    }

    pub fn checks(&self) -> impl Iterator<Item = (&str, &Check)> {
        self.experiments
            .iter()
            .flat_map(|e| e.checks.iter().map(move |c| (e.id.as_str(), c)))
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }
}

/// Files written for a record and any warnings raised while writing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Writes one CSV per series as `<experiment id>.<series name>.csv`.
///
/// Numbers go through [`format_number`], which does not depend on the
/// locale. A record without series writes nothing and returns a
/// warning.
pub fn emit_plot_data(record: &ReportRecord, dir: &Path) -> std::io::Result<PlotOutput> {
    let mut out = PlotOutput::default();
    let series: Vec<(&ExperimentReport, &Series)> = record
        .experiments
        .iter()
        .flat_map(|e| e.series.iter().map(move |s| (e, s)))
        .collect();
    if series.is_empty() {
        out.warnings.push("record has no plottable series; no CSV files written".into());
        return Ok(out);
    }
    fs::create_dir_all(dir)?;
    for (e, s) in series {
        let path = dir.join(format!("{}.{}.csv", file_stem(&e.id), file_stem(&s.name)));
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(&path)?;
        w.write_record(&s.columns)?;
        for row in &s.rows {
            w.write_record(row.iter().map(|&v| format_number(v)))?;
        }
        w.flush()?;
        out.files.push(path);
    }
    Ok(out)
}

pub fn write_report(record: &ReportRecord, path: &Path) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(record).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}
