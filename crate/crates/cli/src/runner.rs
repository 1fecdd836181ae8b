//! Manifest execution: parse, plan, decompose, run, write.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::experiments::{run_job, Context};
use crate::manifest::{parse_manifest, ExperimentKind, OutputFormat, SchemaError};
use crate::plan::{plan, DecKey};
use crate::report::{emit_plot_data, write_report, ReportRecord};

pub const EXIT_PASS: i32 = 0;
/// Some check failed; every computation completed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_WRITE: i32 = 4;

pub const DEFAULT_OUT_DIR: &str = "phaselab-out";
pub const REPORT_FILE: &str = "report.json";

/// Command-line overrides of manifest fields.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Refuse manifests of any other kind.
    pub kind: Option<ExperimentKind>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub verbose: bool,
}

#[derive(Debug)]
pub enum RunError {
    Read { path: PathBuf, source: std::io::Error },
    Schema(SchemaError),
    Numerical { experiment: String, module: &'static str, error: phaselab::Error },
    Write { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Read { .. } | RunError::Schema(_) => EXIT_SCHEMA,
            RunError::Numerical { .. } => EXIT_NUMERICAL,
            RunError::Write { .. } => EXIT_WRITE,
        }
    }

    /// Machine-readable description of a numerical failure.
    pub fn payload(&self) -> Option<serde_json::Value> {
        match self {
            RunError::Numerical { experiment, module, error } => Some(serde_json::json!({
                "experiment": experiment,
                "module": module,
                "error": error.to_string(),
                "detail": format!("{error:?}"),
            })),
            _ => None,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Read { path, source } => write!(f, "cannot read manifest {}: {source}", path.display()),
            RunError::Schema(e) => write!(f, "invalid manifest: {e}"),
            RunError::Numerical { experiment, module, error } => {
                write!(f, "experiment `{experiment}` failed in {module}: {error}")
            }
            RunError::Write { path, source } => write!(f, "cannot write {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<SchemaError> for RunError {
    fn from(e: SchemaError) -> Self {
        RunError::Schema(e)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub record: ReportRecord,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.record.passed {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

pub fn exit_code(result: &Result<RunOutcome, RunError>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(e) => e.exit_code(),
    }
}

pub fn run_manifest(path: &Path, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let bytes = fs::read(path).map_err(|source| RunError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    run_bytes(&bytes, opts)
}

fn log(opts: &RunOptions, msg: impl AsRef<str>) {
    if opts.verbose {
        eprintln!("[phaselab] {}", msg.as_ref());
    }
}

/// Runs a manifest given as raw bytes (hashed as-is).
pub fn run_bytes(bytes: &[u8], opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SchemaError::at("", format!("manifest is not UTF-8: {e}")))?;
    let manifest = parse_manifest(text)?;
    if let Some(k) = opts.kind {
        if k != manifest.kind {
            return Err(SchemaError::at(
                "kind",
                format!("manifest kind `{}` does not match subcommand `{}`", manifest.kind.name(), k.name()),
            )
            .into());
        }
    }
    let jobs = plan(&manifest)?;
    let seed = opts.seed.unwrap_or(manifest.seed);
    let format = opts.format.unwrap_or(manifest.format);
    let out_dir = opts
        .out
        .clone()
        .or_else(|| manifest.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&out_dir).map_err(|source| RunError::Write {
        path: out_dir.clone(),
        source,
    })?;

    let start = Instant::now();
    let mut keys: Vec<DecKey> = Vec::new();
    for k in jobs.iter().flat_map(|j| j.task.needs()) {
        if !keys.iter().any(|x| x.id() == k.id()) {
            keys.push(k);
        }
    }
    log(opts, format!("{} jobs, {} decompositions", jobs.len(), keys.len()));
    let decs = keys
        .par_iter()
        .map(|k| {
            let dec = k.compute().map_err(|error| RunError::Numerical {
                experiment: format!("decomposition N = {}, L = {}", k.grid.points_per_axis(), k.grid.half_width()),
                module: "spectral",
                error,
            })?;
            log(opts, format!("decomposed N = {}, m = {}", k.grid.points_per_axis(), k.modes));
            Ok((k.id(), Arc::new(dec)))
        })
        .collect::<Result<HashMap<_, _>, RunError>>()?;
    let ctx = Context {
        seed,
        decompositions: decs,
    };
    let results: Vec<_> = jobs
        .par_iter()
        .map(|j| {
            let r = run_job(j, &ctx);
            log(opts, format!("finished {}", j.id));
            r
        })
        .collect();
    let mut experiments = Vec::with_capacity(results.len());
    for (job, res) in jobs.iter().zip(results) {
        experiments.push(res.map_err(|error| RunError::Numerical {
            experiment: job.id.clone(),
            module: job.task.module(),
            error,
        })?);
    }

    let mut record = ReportRecord {
        manifest_hash: hex::encode(Sha256::digest(bytes)),
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: manifest.kind.name().to_string(),
        seed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        passed: false,
        experiments,
        warnings: Vec::new(),
    };
    record.passed = record.all_passed();
    let mut files = Vec::new();
    if format.csv() {
        let plots = emit_plot_data(&record, &out_dir).map_err(|source| RunError::Write {
            path: out_dir.clone(),
            source,
        })?;
        for w in plots.warnings {
            record.warn(w);
        }
        files.extend(plots.files);
    }
    if format.json() {
        let path = out_dir.join(REPORT_FILE);
        write_report(&record, &path).map_err(|source| RunError::Write { path: path.clone(), source })?;
        files.push(path);
    }
    Ok(RunOutcome { record, out_dir, files })
}

/// The manifest `phaselab selftest` runs when no `--config` is given.
pub const SELFTEST_MANIFEST: &str = "{\n  \"schema\": 1,\n  \"kind\": \"selftest\"\n}\n";
