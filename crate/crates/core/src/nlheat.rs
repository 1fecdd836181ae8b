//! Semilinear heat equations `∂_t u + H^β u = λ |x|^{-α} |u|^{2ν} u`.
//!
//! The state is kept as modal coefficients on the retained modes, so the
//! linear part is applied exactly; the nonlinearity is evaluated pointwise
//! on the grid and projected back.
//!
//! [`picard_solve`] restarts a fixed-point iteration on every window
//! `[t, t + Δt]`, the computable stand-in for iterating in a ball on
//! `[0, ∞)`. [`etd_evolve`] is an independent exponential integrator used
//! as a cross-check.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::heat_multiplier;
use crate::error::{Error, Result};
use crate::model::{Exponent, MixedNormParams, OscillatorSpec};
use crate::phasespace::{ModulationNorm, ModulationSpace};
use crate::spectral::{FieldSample, SpectralDecomposition};

/// Monitored norms above this value end a trajectory.
pub const BLOW_UP_NORM: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// `λ |u|^{2ν} u`
    Power,
    /// `λ |x|^{-α} |u|^{2ν} u`
    Inhomogeneous { alpha: f64 },
}

#[derive(Debug, Clone)]
pub struct NonlinearProblemSpec {
    pub beta: f64,
    pub nu: u32,
    pub coupling: Complex64,
    pub kind: NonlinearityKind,
    pub initial: FieldSample,
    pub monitor: ModulationSpace,
}

/// Exponent conditions for the inhomogeneous problem, each with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub conditions: Vec<(String, bool)>,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.conditions.iter().all(|(_, ok)| *ok)
    }
}

/// Records `ks < α < d - ls`, `q' ≥ 2ν+2`, `q' > (2ν+1)d/(βl)`,
/// `q > d/(d-α-ls)` and `p > d/(α-ks)`.
pub fn inhomogeneous_admissibility(osc: &OscillatorSpec, beta: f64, nu: u32, alpha: f64, s: f64, np: &MixedNormParams) -> Admissibility {
    let d = osc.dimension() as f64;
    let (k, l) = (osc.k() as f64, osc.l() as f64);
    let nu = nu as f64;
    let value = |e: &Exponent| match e {
        Exponent::Finite(v) => *v,
        Exponent::Infinity => f64::INFINITY,
    };
    let q_conj = np.q_conjugate().map_or(f64::NAN, |e| value(&e));
    let (p, q) = (value(&np.p), value(&np.q));
    let gap_hi = d - alpha - l * s;
    let gap_lo = alpha - k * s;
    Admissibility {
        conditions: vec![
            (format!("ks = {} < α = {alpha} < d - ls = {}", k * s, d - l * s), k * s < alpha && alpha < d - l * s),
            (format!("q' = {q_conj} >= 2ν+2 = {}", 2.0 * nu + 2.0), q_conj >= 2.0 * nu + 2.0),
            (
                format!("q' = {q_conj} > (2ν+1)d/(βl) = {}", (2.0 * nu + 1.0) * d / (beta * l)),
                q_conj > (2.0 * nu + 1.0) * d / (beta * l),
            ),
            (format!("q = {q} > d/(d-α-ls) = {}", d / gap_hi), gap_hi > 0.0 && q > d / gap_hi),
            (format!("p = {p} > d/(α-ks) = {}", d / gap_lo), gap_lo > 0.0 && p > d / gap_lo),
        ],
    }
}

/// Pointwise nonlinearity including the coupling.
pub fn apply_nonlinearity(spec: &NonlinearProblemSpec, u: &FieldSample) -> FieldSample {
    let grid = *u.grid();
    let nu = spec.nu as i32;
    let lambda = spec.coupling;
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let base = lambda * v * v.norm_sqr().powi(nu);
            match spec.kind {
                NonlinearityKind::Power => base,
                NonlinearityKind::Inhomogeneous { alpha } => base * grid.node_norm(i).powf(-alpha),
            }
        })
        .collect();
    FieldSample::new(grid, values).expect("same grid")
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub time: f64,
    pub field: FieldSample,
}

/// Time-indexed solution record.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub monitored: Vec<f64>,
    pub l2: Vec<f64>,
    /// Every `stride`-th step plus the final one.
    pub checkpoints: Vec<Checkpoint>,
    pub stride: usize,
    /// Per window: largest successive-gap ratio after the first iteration.
    pub contraction: Vec<Option<f64>>,
    pub iterations: Vec<usize>,
    /// Time at which the monitored norm exceeded [`BLOW_UP_NORM`] or a
    /// value became non-finite.
    pub blow_up: Option<f64>,
}

impl Trajectory {
    pub fn sup_monitored(&self) -> f64 {
        self.monitored.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_l2(&self) -> f64 {
        self.l2.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_contraction(&self) -> Option<f64> {
        self.contraction.iter().flatten().copied().reduce(f64::max)
    }

    /// CSV with columns `t, monitored_norm, l2_norm, blow_up`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,monitored_norm,l2_norm,blow_up")?;
        for (i, t) in self.times.iter().enumerate() {
            let flag = self.blow_up.is_some() && i + 1 == self.times.len();
            writeln!(out, "{},{},{},{}", t, self.monitored[i], self.l2[i], flag as u8)?;
        }
        Ok(())
    }

    /// Field checkpoints: magic `PLTRAJ01`, `u32` version, `u64` count,
    /// `u64` node count, then per checkpoint `t` and interleaved re/im, all
    /// little-endian `f64`.
    pub fn write_checkpoints(&self, path: &Path) -> Result<()> {
        let nodes = self.checkpoints.first().map_or(0, |c| c.field.values().len());
        let mut buf = Vec::new();
        buf.extend_from_slice(b"PLTRAJ01");
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&(self.checkpoints.len() as u64).to_le_bytes());
        buf.extend_from_slice(&(nodes as u64).to_le_bytes());
        for c in &self.checkpoints {
            buf.extend_from_slice(&c.time.to_le_bytes());
            for v in c.field.values() {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
        }
        std::fs::write(path, buf).map_err(|e| Error::Cache(e.to_string()))
    }
}

/// Shared machinery: modal semigroup, nonlinearity and monitor.
struct Engine<'a> {
    dec: &'a SpectralDecomposition,
    spec: &'a NonlinearProblemSpec,
    monitor: ModulationNorm,
}

type Modal = Vec<Complex64>;

impl<'a> Engine<'a> {
    fn new(dec: &'a SpectralDecomposition, spec: &'a NonlinearProblemSpec) -> Result<Self> {
        let osc = dec
            .oscillator()
            .ok_or_else(|| Error::arg("nonlinear problems need an oscillator-backed decomposition"))?;
        if *spec.initial.grid() != *dec.grid() {
            return Err(Error::GridMismatch("initial data and decomposition grids differ".into()));
        }
        if !(spec.beta > 0.0) || spec.nu < 1 {
            return Err(Error::arg("need beta > 0 and nu >= 1"));
        }
        Ok(Engine {
            dec,
            spec,
            monitor: spec.monitor.evaluator(osc, dec.grid())?,
        })
    }

    fn field(&self, c: &Modal) -> FieldSample {
        self.dec.synthesize(c).expect("modal length")
    }

    fn modal(&self, f: &FieldSample) -> Modal {
        self.dec.analyze(f).expect("grid checked")
    }

    fn semigroup(&self, c: &Modal, tau: f64) -> Modal {
        c.iter()
            .zip(self.dec.eigenvalues())
            .map(|(v, &l)| v * heat_multiplier(l, self.spec.beta, tau))
            .collect()
    }

    fn nonlinear(&self, c: &Modal) -> Modal {
        self.modal(&apply_nonlinearity(self.spec, &self.field(c)))
    }

    fn monitored(&self, c: &Modal) -> Result<f64> {
        self.monitor.norm(&self.field(c))
    }
}

fn axpy(a: &Modal, s: f64, b: &Modal) -> Modal {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

fn l2(c: &Modal) -> f64 {
    c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn check_steps(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt <= 1e-2) {
        return Err(Error::arg(format!("time step must lie in (0, 1e-2], got {dt}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::arg("horizon must be positive"));
    }
    Ok((horizon / dt).round().max(1.0) as usize)
}

/// Iteration controls for [`picard_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub stride: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-10,
            max_iter: 50,
            stride: 1,
        }
    }
}

struct Recorder {
    traj: Trajectory,
    last: usize,
}

impl Recorder {
    fn new(stride: usize, last: usize) -> Self {
        Recorder {
            last,
            traj: Trajectory {
                times: Vec::new(),
                monitored: Vec::new(),
                l2: Vec::new(),
                checkpoints: Vec::new(),
                stride: stride.max(1),
                contraction: Vec::new(),
                iterations: Vec::new(),
                blow_up: None,
            },
        }
    }

    /// Returns `false` once the trajectory has blown up.
    fn push(&mut self, engine: &Engine<'_>, step: usize, t: f64, c: &Modal) -> Result<bool> {
        let norm = if c.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            engine.monitored(c).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        let blown = !norm.is_finite() || norm > BLOW_UP_NORM;
        self.traj.times.push(t);
        self.traj.monitored.push(if norm.is_finite() { norm } else { f64::INFINITY });
        self.traj.l2.push(l2(c));
        if blown {
            self.traj.blow_up = Some(t);
            return Ok(false);
        }
        if step % self.traj.stride == 0 || step == self.last {
            self.traj.checkpoints.push(Checkpoint {
                time: t,
                field: engine.field(c),
            });
        }
        Ok(true)
    }
}

/// Windowed Picard iteration of the Duhamel formula with midpoint
/// quadrature.
///
/// On each window the pair `(u_mid, u_end)` is iterated:
/// `u_mid = S(Δt/2)u + (Δt/2) S(Δt/4) N((u + u_mid)/2)` and
/// `u_end = S(Δt)u + Δt S(Δt/2) N(u_mid)`, starting from the linear
/// prediction. The gap is the monitored norm of the change in the pair.
pub fn picard_solve(
    dec: &SpectralDecomposition,
    spec: &NonlinearProblemSpec,
    horizon: f64,
    dt: f64,
    options: PicardOptions,
) -> Result<Trajectory> {
    let steps = check_steps(horizon, dt)?;
    if !(options.tol >= 1e-10) {
        return Err(Error::arg(format!("tolerance must be at least 1e-10, got {}", options.tol)));
    }
    let engine = Engine::new(dec, spec)?;
    let mut rec = Recorder::new(options.stride, steps);
    let mut c = engine.modal(&spec.initial);
    if !rec.push(&engine, 0, 0.0, &c)? {
        return Ok(rec.traj);
    }
    for step in 1..=steps {
        let t_start = (step - 1) as f64 * dt;
        let lin_mid = engine.semigroup(&c, dt / 2.0);
        let lin_end = engine.semigroup(&c, dt);
        let scale = engine.monitored(&lin_end)?;
        let (mut mid, mut end) = (lin_mid.clone(), lin_end.clone());
        let mut gaps: Vec<f64> = Vec::new();
        let mut converged = false;
        for _ in 0..options.max_iter {
            let quarter: Modal = c.iter().zip(&mid).map(|(a, b)| (a + b) * 0.5).collect();
            let new_mid = axpy(&lin_mid, dt / 2.0, &engine.semigroup(&engine.nonlinear(&quarter), dt / 4.0));
            let new_end = axpy(&lin_end, dt, &engine.semigroup(&engine.nonlinear(&mid), dt / 2.0));
            let d_mid: Modal = new_mid.iter().zip(&mid).map(|(a, b)| a - b).collect();
            let d_end: Modal = new_end.iter().zip(&end).map(|(a, b)| a - b).collect();
            let gap = engine.monitored(&d_mid)?.max(engine.monitored(&d_end)?);
            mid = new_mid;
            end = new_end;
            gaps.push(gap);
            if !gap.is_finite() {
                break;
            }
            if gap <= options.tol * scale.max(f64::MIN_POSITIVE) || gap == 0.0 {
                converged = true;
                break;
            }
        }
        let ratios: Vec<f64> = gaps.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
        let factor = ratios.iter().copied().reduce(f64::max);
        rec.traj.contraction.push(factor);
        rec.traj.iterations.push(gaps.len());
        let t = step as f64 * dt;
        if !converged {
            if gaps.last().is_some_and(|g| !g.is_finite()) {
                rec.traj.times.push(t);
                rec.traj.monitored.push(f64::INFINITY);
                rec.traj.l2.push(f64::INFINITY);
                rec.traj.blow_up = Some(t);
                return Ok(rec.traj);
            }
            return Err(Error::PicardNonConvergence {
                time: t_start,
                iterations: options.max_iter,
                last_factor: factor.unwrap_or(f64::NAN),
            });
        }
        c = end;
        if !rec.push(&engine, step, t, &c)? {
            break;
        }
    }
    Ok(rec.traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtdScheme {
    /// `u⁺ = S(Δt)(u + Δt N(u))`
    First,
    /// `a = S(Δt)(u + Δt N(u))`, `u⁺ = S(Δt)u + (Δt/2)(S(Δt)N(u) + N(a))`
    SecondOrder,
}

/// Exponential time differencing with the exact linear semigroup.
pub fn etd_evolve(
    dec: &SpectralDecomposition,
    spec: &NonlinearProblemSpec,
    horizon: f64,
    dt: f64,
    scheme: EtdScheme,
    stride: usize,
) -> Result<Trajectory> {
    let steps = check_steps(horizon, dt)?;
    let engine = Engine::new(dec, spec)?;
    let mut rec = Recorder::new(stride, steps);
    let mut c = engine.modal(&spec.initial);
    if !rec.push(&engine, 0, 0.0, &c)? {
        return Ok(rec.traj);
    }
    for step in 1..=steps {
        let n = engine.nonlinear(&c);
        let euler = engine.semigroup(&axpy(&c, dt, &n), dt);
        c = match scheme {
            EtdScheme::First => euler,
            EtdScheme::SecondOrder => {
                let na = engine.nonlinear(&euler);
                let sn = engine.semigroup(&n, dt);
                let corr: Modal = sn.iter().zip(&na).map(|(a, b)| (a + b) * (dt / 2.0)).collect();
                axpy(&engine.semigroup(&c, dt), 1.0, &corr)
            }
        };
        if !rec.push(&engine, step, step as f64 * dt, &c)? {
            break;
        }
    }
    Ok(rec.traj)
}

/// `max_k ‖u(t_k) - S(t_k)u₀ - ∫₀^{t_k} S(t_k - s) N(u(s)) ds‖₂` with the
/// integral by the trapezoid rule over the stored checkpoints.
pub fn duhamel_residual(traj: &Trajectory, dec: &SpectralDecomposition, spec: &NonlinearProblemSpec) -> Result<f64> {
    let cps = &traj.checkpoints;
    if cps.len() < 3 {
        return Err(Error::arg(format!("need at least 3 checkpoints, got {}", cps.len())));
    }
    if cps[0].time != 0.0 {
        return Err(Error::arg("first checkpoint must be the initial time"));
    }
    let engine = Engine::new(dec, spec)?;
    let u0 = engine.modal(&cps[0].field);
    let mut acc: Modal = vec![Complex64::new(0.0, 0.0); dec.mode_count()];
    let mut prev_n = engine.modal(&apply_nonlinearity(spec, &cps[0].field));
    let mut worst = 0.0f64;
    for w in cps.windows(2) {
        let tau = w[1].time - w[0].time;
        if !(tau > 0.0) {
            return Err(Error::arg("checkpoint times must increase"));
        }
        let n = engine.modal(&apply_nonlinearity(spec, &w[1].field));
        // A_k = S(τ)A_{k-1} + (τ/2)(S(τ)n_{k-1} + n_k)
        let carried = engine.semigroup(&acc, tau);
        let prev = engine.semigroup(&prev_n, tau);
        acc = carried
            .iter()
            .zip(&prev)
            .zip(&n)
            .map(|((a, p), c)| a + (p + c) * (tau / 2.0))
            .collect();
        let lin = engine.semigroup(&u0, w[1].time);
        let mild = engine.field(&axpy(&lin, 1.0, &acc));
        worst = worst.max(w[1].field.sub(&mild)?.norm_l2());
        prev_n = n;
    }
    Ok(worst)
}

/// Outcome of a smallness-threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Threshold {
    /// Largest passing amplitude found by bisection.
    Found { epsilon: f64, first_failure: f64 },
    /// The criterion held at the upper bracket.
    UpperBracket { epsilon: f64 },
    /// The criterion failed at the lower bracket.
    NoThresholdInRange,
}

/// Configuration of the amplitude bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch {
    pub lower: f64,
    pub upper: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Relative bracket width at which bisection stops.
    pub resolution: f64,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        ThresholdSearch {
            lower: 1e-4,
            upper: 10.0,
            horizon: 2.0,
            dt: 1e-2,
            resolution: 0.01,
        }
    }
}

/// Largest `ε` for which `u₀ = ε·profile` keeps the monitored norm below
/// `2‖u₀‖` up to the horizon. The profile is used as given, so the bound
/// reads `2ε` exactly when it has unit monitored norm. Picard
/// non-convergence and blow-up count as failure.
pub fn smallness_threshold(
    dec: &SpectralDecomposition,
    template: &NonlinearProblemSpec,
    search: ThresholdSearch,
) -> Result<Threshold> {
    if !(search.lower > 0.0 && search.upper > search.lower && search.resolution > 0.0) {
        return Err(Error::arg("bad threshold bracket"));
    }
    if template.initial.max_abs() == 0.0 {
        return Err(Error::arg("profile is identically zero"));
    }
    let passes = |eps: f64| -> Result<bool> {
        let spec = NonlinearProblemSpec {
            initial: template.initial.scaled(eps.into()),
            ..template.clone()
        };
        match picard_solve(dec, &spec, search.horizon, search.dt, PicardOptions { tol: 1e-10, max_iter: 50, stride: usize::MAX }) {
            Ok(traj) => Ok(traj.blow_up.is_none() && traj.sup_monitored() <= 2.0 * traj.monitored[0]),
            Err(Error::PicardNonConvergence { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !passes(search.lower)? {
        return Ok(Threshold::NoThresholdInRange);
    }
    if passes(search.upper)? {
        return Ok(Threshold::UpperBracket { epsilon: search.upper });
    }
    let (mut lo, mut hi) = (search.lower, search.upper);
    while hi / lo > 1.0 + search.resolution {
        let mid = (lo * hi).sqrt();
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold::Found {
        epsilon: lo,
        first_failure: hi,
    })
}
