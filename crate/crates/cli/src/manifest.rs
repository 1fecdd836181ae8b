//! Experiment manifests: a versioned JSON document naming one experiment
//! kind, shared oscillator/grid settings and a kind-specific block.

use std::fmt;
use std::path::PathBuf;

use phaselab::estimators::{QuotientForm, DEFAULT_PROBE_SEED};
use phaselab::model::WeightKind;
use phaselab::nlheat::NonlinearityKind;
use phaselab::{Exponent, Grid, MixedNormParams, OscillatorSpec, WeightSpec};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    Decay,
    Norms,
    Nlheat,
    Ou,
    Selftest,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Norms => "norms",
            ExperimentKind::Nlheat => "nlheat",
            ExperimentKind::Ou => "ou",
            ExperimentKind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        self != OutputFormat::Csv
    }
    pub fn csv(self) -> bool {
        self != OutputFormat::Json
    }
}

/// A manifest that failed to parse or validate.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// Dotted field path, e.g. `params.tuples[1].k`.
    pub path: String,
    pub message: String,
}

impl SchemaError {
    pub fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            line: None,
            column: None,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, "line {l}, column {c}: ")?;
        }
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "field `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    #[serde(default = "one_usize")]
    pub dimension: usize,
    /// Potential `|x|^{2k}`.
    #[serde(default = "one_u32")]
    pub k: u32,
    /// Kinetic part `(-Δ)^l`.
    #[serde(default = "one_u32")]
    pub l: u32,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        OscillatorConfig { dimension: 1, k: 1, l: 1 }
    }
}

impl OscillatorConfig {
    pub fn build(&self) -> phaselab::Result<OscillatorSpec> {
        if !(1..=2).contains(&self.dimension) {
            return Err(phaselab::Error::InvalidArgument(format!("dimension must be 1 or 2, got {}", self.dimension)));
        }
        if self.k == 0 || self.l == 0 {
            return Err(phaselab::Error::InvalidArgument("k and l must be positive".into()));
        }
        Ok(OscillatorSpec::anharmonic(self.dimension, self.k, self.l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub half_width: f64,
    /// Retained eigenmodes; half the node count by default.
    #[serde(default)]
    pub modes: Option<usize>,
}

impl GridConfig {
    pub fn build(&self, dimension: usize) -> phaselab::Result<Grid> {
        Grid::new(dimension, self.points, self.half_width)
    }

    pub fn mode_count(&self, grid: &Grid) -> usize {
        self.modes.unwrap_or(grid.node_count() / 2)
    }
}

/// Oscillator and grid overrides carried by individual cases.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Setting {
    pub oscillator: Option<OscillatorConfig>,
    pub grid: Option<GridConfig>,
}

macro_rules! with_setting {
    ($($t:ty),*) => {$(
        impl $t {
            pub fn setting(&self) -> Setting {
                Setting { oscillator: self.oscillator, grid: self.grid }
            }
        }
    )*};
}

with_setting!(SpectrumCase, LongtimeCase, SpectralSumCase, MoyalBlock, EquivalenceBlock, AlgebraBlock, SingularBlock, NlheatCase, OuParams);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "anharmonic")]
    pub weight: WeightKind,
}

impl NormConfig {
    pub fn weight(&self) -> WeightSpec {
        WeightSpec { kind: self.weight, s: self.s }
    }
    pub fn exponents(&self) -> MixedNormParams {
        MixedNormParams::new(self.p, self.q)
    }
}

// ---- spectrum ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub cases: Vec<SpectrumCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumCase {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Compare `λ_j` with `2j + 1` for `j <= reference_modes` (Hermite, d = 1).
    #[serde(default)]
    pub reference_modes: Option<usize>,
    #[serde(default = "tol_1e6")]
    pub reference_tolerance: f64,
    /// Inclusive `[j_lo, j_hi]` for the power-law fit.
    #[serde(default)]
    pub fit_window: Option<[usize; 2]>,
    #[serde(default = "tol_10pct")]
    pub growth_tolerance: f64,
}

// ---- decay ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayParams {
    #[serde(default)]
    pub quotient: Option<QuotientBlock>,
    #[serde(default)]
    pub longtime: Vec<LongtimeCase>,
    #[serde(default)]
    pub spectral_sum: Vec<SpectralSumCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientBlock {
    pub tuples: Vec<DecayTuple>,
    #[serde(default = "reduced")]
    pub form: QuotientForm,
    #[serde(default)]
    pub t_list: Option<Vec<f64>>,
    #[serde(default = "tol_10pct")]
    pub tolerance: f64,
    #[serde(default = "min_r2")]
    pub min_r_squared: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayTuple {
    #[serde(default = "one_usize")]
    pub dimension: usize,
    pub k: u32,
    pub l: u32,
    pub beta: f64,
    pub p_tilde: Exponent,
    pub q_tilde: Exponent,
    #[serde(default)]
    pub s2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongtimeCase {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    pub beta: f64,
    #[serde(default = "longtime_times")]
    pub times: Vec<f64>,
    #[serde(default = "longtime_norm")]
    pub norm: NormConfig,
    #[serde(default = "thirty")]
    pub packets: usize,
    #[serde(default = "ten")]
    pub eigenfunctions: usize,
    #[serde(default = "tol_5pct")]
    pub tolerance: f64,
    /// Independent value of `λ_0` to compare the lattice ground state with.
    #[serde(default)]
    pub ground_reference: Option<f64>,
    #[serde(default = "tol_1e5")]
    pub ground_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSumCase {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "one_f64")]
    pub beta: f64,
    #[serde(default = "s0_values")]
    pub s0: Vec<f64>,
    #[serde(default = "sum_times")]
    pub times: Vec<f64>,
    #[serde(default = "limit_time")]
    pub limit_time: f64,
    #[serde(default = "tol_1e6")]
    pub tolerance: f64,
}

// ---- norms ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsParams {
    #[serde(default)]
    pub moyal: Option<MoyalBlock>,
    #[serde(default)]
    pub equivalence: Option<EquivalenceBlock>,
    #[serde(default)]
    pub algebra: Option<AlgebraBlock>,
    #[serde(default)]
    pub singular: Option<SingularBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoyalBlock {
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "twenty")]
    pub probes: usize,
    #[serde(default = "tol_1e6")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceBlock {
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "equivalence_s")]
    pub s_values: Vec<f64>,
    #[serde(default = "twenty_f64")]
    pub max_spread: f64,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default = "tol_5pct")]
    pub stability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraBlock {
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "algebra_norm")]
    pub norm: NormConfig,
    #[serde(default = "hundred")]
    pub pairs: usize,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default = "tol_5pct")]
    pub stability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularBlock {
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    pub alpha: f64,
    pub s: f64,
    pub p: Exponent,
    /// `q` of the admissible tuple, checked under truncation doubling.
    pub q_admissible: Exponent,
    /// `q` of the inadmissible tuple, checked under cutoff doubling.
    pub q_inadmissible: Exponent,
    #[serde(default = "eight")]
    pub radius: f64,
    #[serde(default = "one_f64")]
    pub cutoff: f64,
    #[serde(default = "tol_2pct")]
    pub truncation_tolerance: f64,
    #[serde(default = "growth_25pct")]
    pub growth_threshold: f64,
}

// ---- nlheat ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlheatParams {
    pub cases: Vec<NlheatCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlheatCase {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "one_f64")]
    pub beta: f64,
    #[serde(default = "one_u32")]
    pub nu: u32,
    /// Real `λ`, or `[re, im]`.
    pub coupling: Coupling,
    #[serde(default = "power")]
    pub nonlinearity: NonlinearityKind,
    pub monitor: NormConfig,
    pub initial: InitialConfig,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default = "picard_tol")]
    pub tolerance: f64,
    #[serde(default = "fifty")]
    pub max_iter: usize,
    /// Steps between checkpoints.
    #[serde(default = "one_usize")]
    pub stride: usize,
    /// Compare with first-order exponential time differencing.
    #[serde(default = "yes")]
    pub cross_check: bool,
    #[serde(default)]
    pub limits: NlheatLimits,
    #[serde(default)]
    pub threshold: Option<ThresholdConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coupling {
    Real(f64),
    Complex([f64; 2]),
}

impl Coupling {
    pub fn value(self) -> phaselab::Complex64 {
        match self {
            Coupling::Real(r) => phaselab::Complex64::new(r, 0.0),
            Coupling::Complex([re, im]) => phaselab::Complex64::new(re, im),
        }
    }
}

/// `u₀` = projection of `e^{-|x|²/(2w²)}`, scaled to the given monitored norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "profile_width")]
    pub width: f64,
    pub monitored_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlheatLimits {
    #[serde(default = "half")]
    pub contraction: f64,
    /// `sup_t ‖u(t)‖ <= growth · ‖u₀‖`.
    #[serde(default = "two")]
    pub growth: f64,
    /// Residual relative to `sup_t ‖u(t)‖₂`.
    #[serde(default = "tol_1e4")]
    pub residual: f64,
    /// Picard/ETD gap relative to `Δt · sup_t ‖u(t)‖₂`.
    #[serde(default = "ten_f64")]
    pub agreement: f64,
}

impl Default for NlheatLimits {
    fn default() -> Self {
        NlheatLimits {
            contraction: 0.5,
            growth: 2.0,
            residual: 1e-4,
            agreement: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    #[serde(default = "threshold_lower")]
    pub lower: f64,
    #[serde(default = "ten_f64")]
    pub upper: f64,
    #[serde(default = "two")]
    pub horizon: f64,
    #[serde(default = "threshold_dt")]
    pub dt: f64,
    #[serde(default = "threshold_resolution")]
    pub resolution: f64,
}

// ---- ou ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuParams {
    #[serde(default)]
    pub oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "ou_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "longtime_times")]
    pub times: Vec<f64>,
    #[serde(default = "eight_usize")]
    pub probes: usize,
    #[serde(default = "ou_norm")]
    pub norm: NormConfig,
    #[serde(default = "tol_5pct")]
    pub rate_tolerance: f64,
    #[serde(default = "eight")]
    pub safe_radius: f64,
    #[serde(default)]
    pub constant_check: Option<ConstantCheck>,
    /// Bit-for-bit comparison of the Gaussian norm with the conjugated norm.
    #[serde(default = "yes")]
    pub isometry: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantCheck {
    #[serde(default = "six")]
    pub radius: f64,
    #[serde(default = "constant_times")]
    pub times: Vec<f64>,
    #[serde(default = "tol_1e6")]
    pub tolerance: f64,
}

// ---- selftest ----

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestParams {}

#[derive(Debug, Clone)]
pub enum KindParams {
    Spectrum(SpectrumParams),
    Decay(DecayParams),
    Norms(NormsParams),
    Nlheat(NlheatParams),
    Ou(OuParams),
    Selftest(SelftestParams),
}

/// A parsed manifest. Cases are validated later, when the run is planned.
#[derive(Debug, Clone)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub oscillator: Option<OscillatorConfig>,
    pub grid: Option<GridConfig>,
    pub params: KindParams,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<'a> {
    schema: u32,
    kind: ExperimentKind,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    format: OutputFormat,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    oscillator: Option<OscillatorConfig>,
    #[serde(default)]
    grid: Option<GridConfig>,
    #[serde(borrow, default)]
    params: Option<&'a RawValue>,
}

fn json_error(path: String, e: &serde_json::Error) -> SchemaError {
    let mut message = e.to_string();
    // serde_json appends " at line L column C"; the position is reported separately
    if let Some(cut) = message.rfind(" at line ") {
        message.truncate(cut);
    }
    SchemaError {
        line: (e.line() > 0).then_some(e.line()),
        column: (e.line() > 0).then_some(e.column()),
        path,
        message,
    }
}

fn parse_part<'a, T: Deserialize<'a>>(text: &'a str, prefix: &str) -> Result<T, SchemaError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix, inner.as_str()) {
            (p, ".") => p.to_string(),
            ("", i) => i.to_string(),
            (p, i) if i.starts_with('[') => format!("{p}{i}"),
            (p, i) => format!("{p}.{i}"),
        };
        json_error(path, e.inner())
    })?;
    de.end().map_err(|e| json_error(prefix.to_string(), &e))?;
    Ok(value)
}

/// Line and column (1-based) of byte `offset` in `text`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Parses the kind-specific block; positions are mapped back into `text`.
fn parse_block<T: for<'de> Deserialize<'de>>(text: &str, raw: Option<&RawValue>, optional: bool) -> Result<T, SchemaError> {
    let Some(raw) = raw else {
        return if optional {
            parse_part("{}", "params")
        } else {
            Err(SchemaError::at("params", "missing parameter block"))
        };
    };
    let body = raw.get();
    // `body` borrows from `text`, so its offset locates the block in the file
    let offset = body.as_ptr() as usize - text.as_ptr() as usize;
    let (line0, col0) = position(text, offset);
    parse_part(body, "params").map_err(|mut e| {
        if let (Some(l), Some(c)) = (e.line, e.column) {
            e.column = Some(if l == 1 { col0 + c - 1 } else { c });
            e.line = Some(line0 + l - 1);
        }
        e
    })
}

/// Parses and type-checks a manifest document.
pub fn parse_manifest(text: &str) -> Result<ExperimentManifest, SchemaError> {
    let env: Envelope = parse_part(text, "")?;
    if env.schema != SCHEMA_VERSION {
        return Err(SchemaError::at(
            "schema",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", env.schema),
        ));
    }
    let params = match env.kind {
        ExperimentKind::Spectrum => KindParams::Spectrum(parse_block(text, env.params, false)?),
        ExperimentKind::Decay => KindParams::Decay(parse_block(text, env.params, false)?),
        ExperimentKind::Norms => KindParams::Norms(parse_block(text, env.params, false)?),
        ExperimentKind::Nlheat => KindParams::Nlheat(parse_block(text, env.params, false)?),
        ExperimentKind::Ou => KindParams::Ou(parse_block(text, env.params, true)?),
        ExperimentKind::Selftest => KindParams::Selftest(parse_block(text, env.params, true)?),
    };
    Ok(ExperimentManifest {
        kind: env.kind,
        seed: env.seed,
        format: env.format,
        output: env.output,
        oscillator: env.oscillator,
        grid: env.grid,
        params,
    })
}

impl Default for OuParams {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all OU fields have defaults")
    }
}

fn default_seed() -> u64 {
    DEFAULT_PROBE_SEED
}
fn one_usize() -> usize {
    1
}
fn one_u32() -> u32 {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn half() -> f64 {
    0.5
}
fn six() -> f64 {
    6.0
}
fn eight() -> f64 {
    8.0
}
fn eight_usize() -> usize {
    8
}
fn ten() -> usize {
    10
}
fn ten_f64() -> f64 {
    10.0
}
fn twenty() -> usize {
    20
}
fn twenty_f64() -> f64 {
    20.0
}
fn thirty() -> usize {
    30
}
fn fifty() -> usize {
    50
}
fn hundred() -> usize {
    100
}
fn yes() -> bool {
    true
}
fn tol_1e4() -> f64 {
    1e-4
}
fn tol_1e5() -> f64 {
    1e-5
}
fn tol_1e6() -> f64 {
    1e-6
}
fn tol_2pct() -> f64 {
    0.02
}
fn tol_5pct() -> f64 {
    0.05
}
fn tol_10pct() -> f64 {
    0.10
}
fn growth_25pct() -> f64 {
    0.25
}
fn min_r2() -> f64 {
    0.98
}
fn picard_tol() -> f64 {
    1e-10
}
fn profile_width() -> f64 {
    0.8
}
fn threshold_lower() -> f64 {
    1e-4
}
fn threshold_dt() -> f64 {
    1e-2
}
fn threshold_resolution() -> f64 {
    0.01
}
fn limit_time() -> f64 {
    10.0
}
fn reduced() -> QuotientForm {
    QuotientForm::Reduced
}
fn anharmonic() -> WeightKind {
    WeightKind::Anharmonic
}
fn power() -> NonlinearityKind {
    NonlinearityKind::Power
}
fn s0_values() -> Vec<f64> {
    vec![0.0, 2.0]
}
fn equivalence_s() -> Vec<f64> {
    vec![0.0, 1.0, 2.0]
}
fn ou_betas() -> Vec<f64> {
    vec![1.0, 2.0]
}
fn sum_times() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn constant_times() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 3.0]
}
fn longtime_times() -> Vec<f64> {
    (0..9).map(|i| 1.0 + 0.5 * i as f64).collect()
}
fn longtime_norm() -> NormConfig {
    NormConfig {
        p: Exponent::Finite(1.0),
        q: Exponent::Finite(1.0),
        s: 1.0,
        weight: WeightKind::Anharmonic,
    }
}
fn algebra_norm() -> NormConfig {
    NormConfig {
        p: Exponent::Finite(2.0),
        q: Exponent::Finite(2.0),
        s: 2.0,
        weight: WeightKind::Anharmonic,
    }
}
fn ou_norm() -> NormConfig {
    NormConfig {
        p: Exponent::Finite(2.0),
        q: Exponent::Finite(2.0),
        s: 1.0,
        weight: WeightKind::Polynomial,
    }
}
