//! Turning a manifest into validated jobs, before any computation starts.

use std::fmt::Display;

use phaselab::estimators::{default_t_list, WeightQuotientParams};
use phaselab::nlheat::NonlinearityKind;
use phaselab::spectral::{assemble_operator, eigendecompose};
use phaselab::{Grid, OscillatorSpec, SpectralDecomposition};
use serde::Serialize;

use crate::manifest::*;

/// A decomposition some job needs; computed once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct DecKey {
    pub osc: OscillatorSpec,
    pub grid: Grid,
    pub modes: usize,
}

impl DecKey {
    pub fn id(&self) -> String {
        format!("{:?}|{:?}|{}", self.osc, self.grid, self.modes)
    }

    pub fn compute(&self) -> phaselab::Result<SpectralDecomposition> {
        eigendecompose(&assemble_operator(&self.osc, &self.grid)?, self.modes)
    }

    /// Same oscillator on `N → 2N` with twice the modes.
    pub fn refined(&self) -> DecKey {
        DecKey {
            osc: self.osc.clone(),
            grid: self.grid.refined(),
            modes: 2 * self.modes,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Task {
    Spectrum(DecKey, SpectrumCase),
    Quotient {
        params: Box<WeightQuotientParams>,
        tuple: DecayTuple,
        t_list: Vec<f64>,
        tolerance: f64,
        min_r_squared: f64,
    },
    Longtime(DecKey, LongtimeCase),
    SpectralSum(DecKey, SpectralSumCase),
    Moyal(DecKey, MoyalBlock),
    Equivalence(DecKey, EquivalenceBlock),
    Algebra(OscillatorSpec, Grid, AlgebraBlock),
    Singular(OscillatorSpec, Grid, SingularBlock),
    Nlheat(DecKey, Box<NlheatCase>),
    OuConstant(DecKey, ConstantCheck, f64),
    OuIsometry(DecKey, Box<OuParams>),
    OuRate(DecKey, f64, Box<OuParams>),
    Selftest,
}

impl Task {
    pub fn needs(&self) -> Vec<DecKey> {
        match self {
            Task::Spectrum(k, _)
            | Task::Longtime(k, _)
            | Task::SpectralSum(k, _)
            | Task::Moyal(k, _)
            | Task::Nlheat(k, _)
            | Task::OuConstant(k, ..)
            | Task::OuIsometry(k, _)
            | Task::OuRate(k, ..) => vec![k.clone()],
            Task::Equivalence(k, b) if b.refine => vec![k.clone(), k.refined()],
            Task::Equivalence(k, _) => vec![k.clone()],
            Task::Quotient { .. } | Task::Algebra(..) | Task::Singular(..) | Task::Selftest => vec![],
        }
    }

    /// The library module whose errors this task surfaces.
    pub fn module(&self) -> &'static str {
        match self {
            Task::Spectrum(..) => "spectral",
            Task::Quotient { .. } | Task::Longtime(..) | Task::SpectralSum(..) => "estimators",
            Task::Equivalence(..) | Task::Algebra(..) | Task::Singular(..) => "estimators",
            Task::Moyal(..) => "phasespace",
            Task::Nlheat(..) => "nlheat",
            Task::OuConstant(..) | Task::OuIsometry(..) | Task::OuRate(..) => "ougauss",
            Task::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Job {
    pub id: String,
    pub parameters: serde_json::Value,
    pub task: Task,
}

fn bad(path: impl Into<String>, e: impl Display) -> SchemaError {
    SchemaError::at(path, e.to_string())
}

fn ensure(ok: bool, path: &str, msg: impl Into<String>) -> Result<(), SchemaError> {
    if ok {
        Ok(())
    } else {
        Err(SchemaError::at(path, msg))
    }
}

fn params_of<T: Serialize>(t: &T) -> serde_json::Value {
    serde_json::to_value(t).expect("config types serialize")
}

struct Resolver<'a> {
    manifest: &'a ExperimentManifest,
}

impl Resolver<'_> {
    fn oscillator(&self, s: &Setting, path: &str) -> Result<OscillatorSpec, SchemaError> {
        let (cfg, p) = match s.oscillator {
            Some(o) => (o, format!("{path}.oscillator")),
            None => (self.manifest.oscillator.unwrap_or_default(), "oscillator".to_string()),
        };
        cfg.build().map_err(|e| bad(p, e))
    }

    fn grid(&self, s: &Setting, osc: &OscillatorSpec, path: &str) -> Result<(Grid, GridConfig), SchemaError> {
        let (cfg, p) = match (s.grid, self.manifest.grid) {
            (Some(g), _) => (g, format!("{path}.grid")),
            (None, Some(g)) => (g, "grid".to_string()),
            (None, None) => return Err(SchemaError::at(format!("{path}.grid"), "no grid given here or at the top level")),
        };
        let grid = cfg.build(osc.dimension()).map_err(|e| bad(&p, e))?;
        let m = cfg.mode_count(&grid);
        ensure(m >= 1 && m <= grid.node_count(), &format!("{p}.modes"), format!("modes must lie in 1..={}", grid.node_count()))?;
        Ok((grid, cfg))
    }

    fn key(&self, s: &Setting, path: &str) -> Result<DecKey, SchemaError> {
        let osc = self.oscillator(s, path)?;
        let (grid, cfg) = self.grid(s, &osc, path)?;
        Ok(DecKey {
            modes: cfg.mode_count(&grid),
            osc,
            grid,
        })
    }
}

fn positive(v: f64, path: &str) -> Result<(), SchemaError> {
    ensure(v.is_finite() && v > 0.0, path, format!("must be positive and finite, got {v}"))
}

fn nonnegative(v: f64, path: &str) -> Result<(), SchemaError> {
    ensure(v.is_finite() && v >= 0.0, path, format!("must be nonnegative and finite, got {v}"))
}

fn times(ts: &[f64], min_len: usize, path: &str) -> Result<(), SchemaError> {
    ensure(ts.len() >= min_len, path, format!("need at least {min_len} times"))?;
    for (i, &t) in ts.iter().enumerate() {
        nonnegative(t, &format!("{path}[{i}]"))?;
    }
    ensure(ts.windows(2).all(|w| w[1] > w[0]), path, "times must be strictly increasing")
}

fn name_or(name: &Option<String>, fallback: String) -> String {
    name.clone().unwrap_or(fallback)
}

fn norm_config(n: &NormConfig, path: &str) -> Result<(), SchemaError> {
    nonnegative(n.s, &format!("{path}.s"))
}

/// Validates every block of `manifest` and lays out its jobs.
pub fn plan(manifest: &ExperimentManifest) -> Result<Vec<Job>, SchemaError> {
    let r = Resolver { manifest };
    let mut jobs = Vec::new();
    match &manifest.params {
        KindParams::Spectrum(p) => {
            for (i, case) in p.cases.iter().enumerate() {
                let path = format!("params.cases[{i}]");
                let key = r.key(&case.setting(), &path)?;
                if let Some(n) = case.reference_modes {
                    ensure(
                        key.osc.is_hermite() && key.osc.dimension() == 1,
                        &format!("{path}.reference_modes"),
                        "the 2j + 1 reference applies to the one-dimensional Hermite operator only",
                    )?;
                    ensure(n < key.modes, &format!("{path}.reference_modes"), "exceeds the retained modes")?;
                }
                positive(case.reference_tolerance, &format!("{path}.reference_tolerance"))?;
                positive(case.growth_tolerance, &format!("{path}.growth_tolerance"))?;
                if let Some([lo, hi]) = case.fit_window {
                    let p = format!("{path}.fit_window");
                    ensure(lo >= 20, &p, "j_lo must be at least 20")?;
                    ensure(hi >= lo + 19, &p, "window needs at least 20 points")?;
                    ensure(hi as f64 <= 0.4 * key.modes as f64, &p, format!("j_hi exceeds 0.4 x {} retained modes", key.modes))?;
                }
                jobs.push(Job {
                    id: name_or(&case.name, format!("spectrum-{}", i + 1)),
                    parameters: params_of(case),
                    task: Task::Spectrum(key, case.clone()),
                });
            }
        }
        KindParams::Decay(p) => {
            if let Some(q) = &p.quotient {
                let t_list = q.t_list.clone().unwrap_or_else(default_t_list);
                let tp = "params.quotient.t_list";
                ensure(t_list.len() >= 6, tp, "need at least 6 times")?;
                ensure(t_list.iter().all(|&t| t > 0.0 && t <= 1.0), tp, "times must lie in (0, 1]")?;
                let span = t_list.iter().copied().fold(0.0, f64::max) / t_list.iter().copied().fold(f64::INFINITY, f64::min);
                ensure(span.log10() >= 1.5 - 1e-12, tp, "times must span at least 1.5 decades")?;
                positive(q.tolerance, "params.quotient.tolerance")?;
                for (i, tuple) in q.tuples.iter().enumerate() {
                    let path = format!("params.quotient.tuples[{i}]");
                    let osc = OscillatorConfig {
                        dimension: tuple.dimension,
                        k: tuple.k,
                        l: tuple.l,
                    }
                    .build()
                    .and_then(|o| o.with_beta(tuple.beta))
                    .map_err(|e| bad(&path, e))?;
                    let params = WeightQuotientParams::new(osc, tuple.s2, tuple.p_tilde, tuple.q_tilde, q.form)
                        .map_err(|e| bad(&path, e))?;
                    jobs.push(Job {
                        id: format!("quotient-{}", i + 1),
                        parameters: serde_json::json!({ "tuple": tuple, "form": q.form, "t_list": t_list }),
                        task: Task::Quotient {
                            params: Box::new(params),
                            tuple: tuple.clone(),
                            t_list: t_list.clone(),
                            tolerance: q.tolerance,
                            min_r_squared: q.min_r_squared,
                        },
                    });
                }
            }
            for (i, case) in p.longtime.iter().enumerate() {
                let path = format!("params.longtime[{i}]");
                let key = r.key(&case.setting(), &path)?;
                positive(case.beta, &format!("{path}.beta"))?;
                times(&case.times, 2, &format!("{path}.times"))?;
                norm_config(&case.norm, &format!("{path}.norm"))?;
                ensure(case.packets + case.eigenfunctions > 0, &path, "need at least one probe")?;
                ensure(case.eigenfunctions <= key.modes, &format!("{path}.eigenfunctions"), "exceeds the retained modes")?;
                jobs.push(Job {
                    id: name_or(&case.name, format!("longtime-{}", i + 1)),
                    parameters: params_of(case),
                    task: Task::Longtime(key, case.clone()),
                });
            }
            for (i, case) in p.spectral_sum.iter().enumerate() {
                let path = format!("params.spectral_sum[{i}]");
                let key = r.key(&case.setting(), &path)?;
                positive(case.beta, &format!("{path}.beta"))?;
                times(&case.times, 2, &format!("{path}.times"))?;
                ensure(case.times[0] >= 1.0, &format!("{path}.times"), "times must be >= 1")?;
                ensure(case.limit_time >= 1.0, &format!("{path}.limit_time"), "must be >= 1")?;
                for (j, &s0) in case.s0.iter().enumerate() {
                    nonnegative(s0, &format!("{path}.s0[{j}]"))?;
                }
                jobs.push(Job {
                    id: name_or(&case.name, format!("spectral-sum-{}", i + 1)),
                    parameters: params_of(case),
                    task: Task::SpectralSum(key, case.clone()),
                });
            }
        }
        KindParams::Norms(p) => {
            if let Some(b) = &p.moyal {
                let key = r.key(&b.setting(), "params.moyal")?;
                ensure(b.probes > 0, "params.moyal.probes", "need at least one probe")?;
                jobs.push(Job {
                    id: "moyal".into(),
                    parameters: params_of(b),
                    task: Task::Moyal(key, b.clone()),
                });
            }
            if let Some(b) = &p.equivalence {
                let key = r.key(&b.setting(), "params.equivalence")?;
                for (j, &s) in b.s_values.iter().enumerate() {
                    nonnegative(s, &format!("params.equivalence.s_values[{j}]"))?;
                }
                jobs.push(Job {
                    id: "equivalence".into(),
                    parameters: params_of(b),
                    task: Task::Equivalence(key, b.clone()),
                });
            }
            if let Some(b) = &p.algebra {
                let osc = r.oscillator(&b.setting(), "params.algebra")?;
                let (grid, _) = r.grid(&b.setting(), &osc, "params.algebra")?;
                norm_config(&b.norm, "params.algebra.norm")?;
                ensure(b.pairs > 0, "params.algebra.pairs", "need at least one pair")?;
                jobs.push(Job {
                    id: "algebra".into(),
                    parameters: params_of(b),
                    task: Task::Algebra(osc, grid, b.clone()),
                });
            }
            if let Some(b) = &p.singular {
                let osc = r.oscillator(&b.setting(), "params.singular")?;
                let (grid, _) = r.grid(&b.setting(), &osc, "params.singular")?;
                positive(b.alpha, "params.singular.alpha")?;
                nonnegative(b.s, "params.singular.s")?;
                positive(b.radius, "params.singular.radius")?;
                ensure(b.radius <= grid.half_width(), "params.singular.radius", "exceeds the grid half width")?;
                let nyquist = grid.points_per_axis() as f64 / (4.0 * grid.half_width());
                positive(b.cutoff, "params.singular.cutoff")?;
                ensure(
                    2.0 * b.cutoff <= nyquist,
                    "params.singular.cutoff",
                    format!("doubled cutoff exceeds the lattice limit {nyquist}"),
                )?;
                jobs.push(Job {
                    id: "singular".into(),
                    parameters: params_of(b),
                    task: Task::Singular(osc, grid, b.clone()),
                });
            }
        }
        KindParams::Nlheat(p) => {
            for (i, case) in p.cases.iter().enumerate() {
                let path = format!("params.cases[{i}]");
                let key = r.key(&case.setting(), &path)?;
                positive(case.beta, &format!("{path}.beta"))?;
                ensure(case.nu >= 1, &format!("{path}.nu"), "must be at least 1")?;
                positive(case.horizon, &format!("{path}.horizon"))?;
                ensure(
                    case.dt > 0.0 && case.dt <= 1e-2,
                    &format!("{path}.dt"),
                    format!("must lie in (0, 1e-2], got {}", case.dt),
                )?;
                ensure(case.tolerance >= 1e-10, &format!("{path}.tolerance"), "must be at least 1e-10")?;
                ensure(case.max_iter >= 1, &format!("{path}.max_iter"), "must be at least 1")?;
                ensure(case.stride >= 1, &format!("{path}.stride"), "must be at least 1")?;
                positive(case.initial.width, &format!("{path}.initial.width"))?;
                positive(case.initial.monitored_norm, &format!("{path}.initial.monitored_norm"))?;
                norm_config(&case.monitor, &format!("{path}.monitor"))?;
                if let NonlinearityKind::Inhomogeneous { alpha } = case.nonlinearity {
                    positive(alpha, &format!("{path}.nonlinearity.alpha"))?;
                }
                if let Some(t) = &case.threshold {
                    let tp = format!("{path}.threshold");
                    ensure(t.lower > 0.0 && t.upper > t.lower, &tp, "need 0 < lower < upper")?;
                    positive(t.horizon, &format!("{tp}.horizon"))?;
                    ensure(t.dt > 0.0 && t.dt <= 1e-2, &format!("{tp}.dt"), "must lie in (0, 1e-2]")?;
                    positive(t.resolution, &format!("{tp}.resolution"))?;
                }
                jobs.push(Job {
                    id: name_or(&case.name, format!("nlheat-{}", i + 1)),
                    parameters: params_of(case),
                    task: Task::Nlheat(key, Box::new(case.clone())),
                });
            }
        }
        KindParams::Ou(p) => {
            let key = r.key(&p.setting(), "params")?;
            ensure(key.osc.is_hermite(), "oscillator", "the OU experiments need the Hermite operator (k = l = 1)")?;
            positive(p.safe_radius, "params.safe_radius")?;
            ensure(p.probes > 0, "params.probes", "need at least one probe")?;
            norm_config(&p.norm, "params.norm")?;
            times(&p.times, 2, "params.times")?;
            for (j, &b) in p.betas.iter().enumerate() {
                positive(b, &format!("params.betas[{j}]"))?;
            }
            let shared = Box::new(p.clone());
            if let Some(c) = &p.constant_check {
                times(&c.times, 1, "params.constant_check.times")?;
                positive(c.radius, "params.constant_check.radius")?;
                jobs.push(Job {
                    id: "ou-constant".into(),
                    parameters: params_of(c),
                    task: Task::OuConstant(key.clone(), c.clone(), p.safe_radius),
                });
            }
            if p.isometry {
                jobs.push(Job {
                    id: "ou-isometry".into(),
                    parameters: serde_json::json!({ "norm": p.norm, "probes": p.probes }),
                    task: Task::OuIsometry(key.clone(), shared.clone()),
                });
            }
            for &beta in &p.betas {
                jobs.push(Job {
                    id: format!("ou-rate-beta-{beta}"),
                    parameters: serde_json::json!({ "beta": beta, "times": p.times, "norm": p.norm, "probes": p.probes }),
                    task: Task::OuRate(key.clone(), beta, shared.clone()),
                });
            }
        }
        KindParams::Selftest(_) => jobs.push(Job {
            id: "selftest".into(),
            parameters: serde_json::json!({}),
            task: Task::Selftest,
        }),
    }
    let mut seen = std::collections::HashSet::new();
    for j in &jobs {
        ensure(seen.insert(j.id.clone()), "params", format!("duplicate case name `{}`", j.id))?;
    }
    Ok(jobs)
}
