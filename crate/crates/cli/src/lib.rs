//! Manifest-driven experiment runner for `phaselab`.
//!
//! A manifest is a JSON document with a top-level `"schema": 1`, an
//! experiment `kind`, optional shared `oscillator` and `grid` blocks and a
//! kind-specific `params` block. [`run_manifest`] validates the whole
//! document, computes the needed spectral decompositions once, runs the
//! cases concurrently and writes `report.json` plus one CSV per series.

pub mod experiments;
pub mod manifest;
pub mod plan;
pub mod report;
pub mod runner;
mod selftest;

pub use manifest::{parse_manifest, ExperimentKind, ExperimentManifest, OutputFormat, SchemaError};
pub use report::{emit_plot_data, Check, ExperimentReport, ReportRecord, Series};
pub use runner::{exit_code, run_bytes, run_manifest, RunError, RunOptions, RunOutcome};
