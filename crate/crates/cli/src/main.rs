use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phaselab_cli::manifest::{ExperimentKind, OutputFormat};
use phaselab_cli::report::Relation;
use phaselab_cli::runner::{run_bytes, run_manifest, RunOptions, RunOutcome, SELFTEST_MANIFEST};

/// Phase-space experiments for fractional anharmonic oscillators.
#[derive(Parser)]
#[command(name = "phaselab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, Hermite reference values and growth exponents.
    Spectrum(Flags),
    /// Smoothing exponents, long-time rates and spectral sums.
    Decay(Flags),
    /// Moyal identity, norm equivalence, algebra ratios, singular weights.
    Norms(Flags),
    /// Nonlinear heat flow with Picard and exponential integrators.
    Nlheat(Flags),
    /// Ornstein–Uhlenbeck semigroup through the Gaussian conjugation.
    Ou(Flags),
    /// Quick examples with exact answers across all modules.
    Selftest(Flags),
}

#[derive(Args)]
struct Flags {
    /// Manifest file (JSON).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides the manifest.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Probe seed; overrides the manifest.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn summarize(outcome: &RunOutcome) {
    let rec = &outcome.record;
    for (id, c) in rec.checks() {
        let cmp = match c.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        println!(
            "{} {id}: {} = {:.6e} (deviation {:.3e} {cmp} {:.3e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.deviation,
            c.tolerance
        );
    }
    for e in &rec.experiments {
        for w in &e.warnings {
            println!("WARN {}: {w}", e.id);
        }
    }
    for w in &rec.warnings {
        println!("WARN {w}");
    }
    println!(
        "{} in {:.2} s; output in {}",
        if rec.passed { "all checks passed" } else { "some checks failed" },
        rec.wall_time_seconds,
        outcome.out_dir.display()
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match cli.command {
        Command::Spectrum(f) => (ExperimentKind::Spectrum, f),
        Command::Decay(f) => (ExperimentKind::Decay, f),
        Command::Norms(f) => (ExperimentKind::Norms, f),
        Command::Nlheat(f) => (ExperimentKind::Nlheat, f),
        Command::Ou(f) => (ExperimentKind::Ou, f),
        Command::Selftest(f) => (ExperimentKind::Selftest, f),
    };
    if let Some(n) = flags.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let opts = RunOptions {
        kind: Some(kind),
        out: flags.out,
        format: flags.format,
        seed: flags.seed,
        verbose: flags.verbose,
    };
    let result = match (&flags.config, kind) {
        (Some(path), _) => run_manifest(path, &opts),
        (None, ExperimentKind::Selftest) => run_bytes(SELFTEST_MANIFEST.as_bytes(), &opts),
        (None, _) => {
            eprintln!("error: --config is required for `{}`", kind.name());
            return ExitCode::from(2);
        }
    };
    let code = phaselab_cli::exit_code(&result);
    match &result {
        Ok(outcome) => summarize(outcome),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(p) = e.payload() {
                eprintln!("{p}");
            }
        }
    }
    ExitCode::from(code as u8)
}
