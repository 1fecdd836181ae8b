//! Running planned jobs and turning their results into report entries.

use std::collections::HashMap;
use std::sync::Arc;

use phaselab::estimators::{
    algebra_ratio, band_limit, fifty_probe_family, fit_decay_exponent, longtime_rate, mixed_corpus, packet_pairs,
    random_packets, sigma, singular_frequency_growth, singular_weight_norm, sobolev_modulation_equivalence,
    spectral_sum_bound, weight_quotient_norm, WeightQuotientParams,
};
use phaselab::nlheat::{
    duhamel_residual, etd_evolve, inhomogeneous_admissibility, picard_solve, smallness_threshold, EtdScheme,
    NonlinearProblemSpec, NonlinearityKind, PicardOptions, Threshold, ThresholdSearch, Trajectory,
};
use phaselab::numerics::fit_line;
use phaselab::ougauss::{
    gaussian_modulation_norm, ou_longtime_rate, ou_probes, ou_semigroup, GaussianConjugation,
};
use phaselab::phasespace::{boundary_guard, gaussian_multiply, modulation_norm, FrequencyBand, ModulationSpace, WindowSpec};
use phaselab::{FieldSample, Grid, MixedNormParams, OscillatorSpec, SpectralDecomposition, WeightSpec};

use crate::manifest::*;
use crate::plan::{DecKey, Job, Task};
use crate::report::{Check, ExperimentReport, Series};
use crate::selftest;

/// Shared, read-only inputs of a run.
pub struct Context {
    pub seed: u64,
    pub decompositions: HashMap<String, Arc<SpectralDecomposition>>,
}

impl Context {
    fn dec(&self, key: &DecKey) -> &SpectralDecomposition {
        &self.decompositions[&key.id()]
    }
}

pub fn run_job(job: &Job, ctx: &Context) -> phaselab::Result<ExperimentReport> {
    let mut r = ExperimentReport::new(job.id.clone(), job.parameters.clone());
    match &job.task {
        Task::Spectrum(key, case) => spectrum(&mut r, ctx.dec(key), case)?,
        Task::Quotient {
            params,
            tuple,
            t_list,
            tolerance,
            min_r_squared,
        } => quotient(&mut r, params, tuple, t_list, *tolerance, *min_r_squared)?,
        Task::Longtime(key, case) => longtime(&mut r, ctx.dec(key), case, ctx.seed)?,
        Task::SpectralSum(key, case) => spectral_sum(&mut r, ctx.dec(key), case)?,
        Task::Moyal(key, b) => moyal(&mut r, ctx.dec(key), b, ctx.seed)?,
        Task::Equivalence(key, b) => {
            let fine = b.refine.then(|| ctx.dec(&key.refined()));
            equivalence(&mut r, ctx.dec(key), fine, b, ctx.seed)?
        }
        Task::Algebra(osc, grid, b) => algebra(&mut r, osc, *grid, b, ctx.seed)?,
        Task::Singular(osc, grid, b) => singular(&mut r, osc, *grid, b)?,
        Task::Nlheat(key, case) => nlheat(&mut r, ctx.dec(key), case)?,
        Task::OuConstant(key, c, radius) => ou_constant(&mut r, ctx.dec(key), c, *radius)?,
        Task::OuIsometry(key, p) => ou_isometry(&mut r, ctx.dec(key), p, ctx.seed)?,
        Task::OuRate(key, beta, p) => ou_rate(&mut r, ctx.dec(key), *beta, p, ctx.seed)?,
        Task::Selftest => selftest::run(&mut r)?,
    }
    Ok(r)
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn oscillator(dec: &SpectralDecomposition) -> phaselab::Result<&OscillatorSpec> {
    dec.oscillator()
        .ok_or_else(|| phaselab::Error::InvalidArgument("decomposition has no oscillator".into()))
}

fn guard_probes(r: &mut ExperimentReport, probes: &[FieldSample]) {
    for (i, f) in probes.iter().enumerate() {
        if let Some(w) = boundary_guard(f) {
            r.warn(format!("probe {i}: {w}"));
        }
    }
}

fn spectrum(r: &mut ExperimentReport, dec: &SpectralDecomposition, case: &SpectrumCase) -> phaselab::Result<()> {
    let osc = oscillator(dec)?;
    let m = dec.mode_count();
    r.info("ground_eigenvalue", dec.ground_eigenvalue());
    r.info("orthonormality_defect", dec.orthonormality_defect());
    if let Some(n) = case.reference_modes {
        let worst = max((0..=n).map(|j| {
            let exact = 2.0 * j as f64 + 1.0;
            (dec.eigenvalue(j) - exact).abs() / exact
        }));
        r.check(Check::at_most("reference_relative_error", worst, Some(0.0), worst, case.reference_tolerance));
    }
    let (k, l, d) = (osc.k() as f64, osc.l() as f64, osc.dimension() as f64);
    let mut target = 2.0 * k * l / (d * (k + l));
    let (lo, hi) = match case.fit_window {
        Some([lo, hi]) => {
            let fit = phaselab::spectral::eigenvalue_growth_fit(dec, lo, hi)?;
            r.check(Check::relative("growth_exponent", fit.slope, fit.target, case.growth_tolerance));
            r.info("growth_r_squared", fit.r_squared);
            target = fit.target;
            (lo, hi)
        }
        None => (1, m - 1),
    };
    // the target line passes through the centroid of the fitted window
    let count = (hi + 1 - lo) as f64;
    let anchor = (lo..=hi)
        .map(|j| dec.eigenvalue(j).ln() - target * (j as f64).ln())
        .sum::<f64>()
        / count;
    let mut s = Series::new("spectrum", &["j", "lambda", "target_exponent_line"]);
    for j in 1..m {
        s.push(vec![j as f64, dec.eigenvalue(j), (anchor + target * (j as f64).ln()).exp()]);
    }
    r.series.push(s);
    Ok(())
}

fn quotient(
    r: &mut ExperimentReport,
    params: &WeightQuotientParams,
    tuple: &DecayTuple,
    t_list: &[f64],
    tolerance: f64,
    min_r_squared: f64,
) -> phaselab::Result<()> {
    let sig = sigma(tuple.dimension, tuple.k, tuple.l, tuple.beta, &tuple.p_tilde, &tuple.q_tilde);
    let samples = t_list
        .iter()
        .map(|&t| Ok((t, weight_quotient_norm(params, t)?)))
        .collect::<phaselab::Result<Vec<_>>>()?;
    let fit = fit_decay_exponent(&samples, sig)?;
    r.check(Check::relative("slope", fit.slope, fit.target, tolerance));
    r.check(Check::at_least("r_squared", fit.r_squared, None, fit.r_squared, min_r_squared));
    r.info("sigma", sig);
    r.info("n_pow", params.n_pow as f64);
    r.info("intercept", fit.intercept);
    if fit.flagged {
        r.warn(format!("decay fit has R² = {:.4} below 0.98", fit.r_squared));
    }
    let n = samples.len() as f64;
    let mean_lt = samples.iter().map(|s| s.0.ln()).sum::<f64>() / n;
    let mean_lv = samples.iter().map(|s| s.1.ln()).sum::<f64>() / n;
    let mut s = Series::new("decay", &["t", "value", "log10_t", "log10_value", "fitted", "target"]);
    for &(t, v) in &samples {
        let fitted = (fit.intercept + fit.slope * t.ln()).exp();
        let target = (mean_lv + sig * mean_lt - sig * t.ln()).exp();
        s.push(vec![t, v, t.log10(), v.log10(), fitted, target]);
    }
    r.series.push(s);
    Ok(())
}

/// `(t, value, ln value, fitted, target)` rows for an exponential-rate fit.
fn rate_series(name: &str, times: &[f64], values: &[f64], target_rate: f64) -> phaselab::Result<Series> {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = fit_line(times, &logs)?;
    let n = times.len() as f64;
    let (mt, ml) = (times.iter().sum::<f64>() / n, logs.iter().sum::<f64>() / n);
    let mut s = Series::new(name, &["t", "value", "ln_value", "fitted", "target"]);
    for (&t, &v) in times.iter().zip(values) {
        let fitted = (fit.intercept + fit.slope * t).exp();
        let target = (ml + target_rate * (t - mt)).exp();
        s.push(vec![t, v, v.ln(), fitted, target]);
    }
    Ok(s)
}

fn space(n: &NormConfig) -> ModulationSpace {
    ModulationSpace::new(n.weight(), n.exponents())
}

fn longtime(r: &mut ExperimentReport, dec: &SpectralDecomposition, case: &LongtimeCase, seed: u64) -> phaselab::Result<()> {
    let osc = oscillator(dec)?;
    let norm = space(&case.norm).evaluator(osc, dec.grid())?;
    let probes = mixed_corpus(dec, case.packets, case.eigenfunctions, seed);
    guard_probes(r, &probes);
    let fit = longtime_rate(dec, case.beta, &case.times, &norm, &norm, &probes)?;
    r.check(Check::relative("rate", fit.rate, fit.target, case.tolerance));
    r.info("r_squared", fit.r_squared);
    r.info("ground_eigenvalue", dec.ground_eigenvalue());
    if let Some(g) = case.ground_reference {
        r.check(Check::relative("ground_eigenvalue", dec.ground_eigenvalue(), g, case.ground_tolerance));
    }
    r.series.push(rate_series("rate", &fit.times, &fit.bounds, fit.target)?);
    Ok(())
}

fn spectral_sum(r: &mut ExperimentReport, dec: &SpectralDecomposition, case: &SpectralSumCase) -> phaselab::Result<()> {
    let ground = dec.ground_eigenvalue();
    for &s0 in &case.s0 {
        let ratios = case
            .times
            .iter()
            .map(|&t| Ok(spectral_sum_bound(dec, case.beta, s0, t)?.1))
            .collect::<phaselab::Result<Vec<f64>>>()?;
        let increase = max(ratios.windows(2).map(|w| (w[1] - w[0]) / w[0]));
        r.check(Check::at_most(format!("non_increasing_s0_{s0}"), increase, Some(0.0), increase, 0.0));
        let limit = spectral_sum_bound(dec, case.beta, s0, case.limit_time)?.1;
        let target = ground.powf(s0);
        r.check(Check::at_most(format!("limit_s0_{s0}"), limit, Some(target), (limit - target).abs(), case.tolerance));
        let mut s = Series::new(format!("spectral_sum_s0_{s0}"), &["t", "ratio"]);
        for (&t, &v) in case.times.iter().zip(&ratios) {
            s.push(vec![t, v]);
        }
        s.push(vec![case.limit_time, limit]);
        r.series.push(s);
    }
    Ok(())
}

fn moyal(r: &mut ExperimentReport, dec: &SpectralDecomposition, b: &MoyalBlock, seed: u64) -> phaselab::Result<()> {
    let osc = oscillator(dec)?;
    let grid = *dec.grid();
    let probes: Vec<FieldSample> = random_packets(grid.dimension(), b.probes, seed)
        .iter()
        .map(|p| band_limit(dec, &p.sample(grid)))
        .collect();
    guard_probes(r, &probes);
    let norm = ModulationSpace::new(WeightSpec::anharmonic(0.0), MixedNormParams::finite(2.0, 2.0)?).evaluator(osc, &grid)?;
    let mut s = Series::new("moyal", &["probe", "l2_norm", "modulation_norm"]);
    let mut worst: f64 = 0.0;
    for (i, f) in probes.iter().enumerate() {
        let (l2, m) = (f.norm_l2(), norm.norm(f)?);
        worst = worst.max((m - l2).abs() / l2);
        s.push(vec![i as f64, l2, m]);
    }
    r.check(Check::at_most("moyal_relative_error", worst, Some(0.0), worst, b.tolerance));
    r.series.push(s);
    Ok(())
}

fn equivalence(
    r: &mut ExperimentReport,
    dec: &SpectralDecomposition,
    fine: Option<&SpectralDecomposition>,
    b: &EquivalenceBlock,
    seed: u64,
) -> phaselab::Result<()> {
    let family = |d: &SpectralDecomposition| -> Vec<FieldSample> {
        fifty_probe_family(d, seed).iter().map(|f| band_limit(d, f)).collect()
    };
    let osc = oscillator(dec)?;
    let coarse_probes = family(dec);
    let fine_probes = fine.map(family);
    guard_probes(r, &coarse_probes);
    for &s_val in &b.s_values {
        let band_on = |d: &SpectralDecomposition, probes: &[FieldSample]| {
            let norm = ModulationSpace::new(WeightSpec::anharmonic(s_val), MixedNormParams::finite(2.0, 2.0)?)
                .evaluator(osc, d.grid())?;
            sobolev_modulation_equivalence(d, s_val, &norm, probes)
        };
        let band = band_on(dec, &coarse_probes)?;
        r.check(Check::at_most(format!("spread_s{s_val}"), band.spread(), None, band.spread(), b.max_spread));
        r.info(format!("band_min_s{s_val}"), band.min);
        r.info(format!("band_max_s{s_val}"), band.max);
        let mut series = Series::new(format!("ratios_s{s_val}"), &["probe", "ratio"]);
        if let (Some(fd), Some(fp)) = (fine, &fine_probes) {
            let refined = band_on(fd, fp)?;
            let change = ((refined.min / band.min) - 1.0).abs().max(((refined.max / band.max) - 1.0).abs());
            r.check(Check::at_most(format!("refinement_s{s_val}"), change, Some(0.0), change, b.stability));
            series = Series::new(format!("ratios_s{s_val}"), &["probe", "ratio", "ratio_refined"]);
            for (i, (a, c)) in band.ratios.iter().zip(&refined.ratios).enumerate() {
                series.push(vec![i as f64, *a, *c]);
            }
        } else {
            for (i, a) in band.ratios.iter().enumerate() {
                series.push(vec![i as f64, *a]);
            }
        }
        r.series.push(series);
    }
    Ok(())
}

fn algebra(r: &mut ExperimentReport, osc: &OscillatorSpec, grid: Grid, b: &AlgebraBlock, seed: u64) -> phaselab::Result<()> {
    let pairs = packet_pairs(grid.dimension(), b.pairs, seed);
    let ratios_on = |g: Grid| -> phaselab::Result<Vec<Option<f64>>> {
        let norm = space(&b.norm).evaluator(osc, &g)?;
        pairs.iter().map(|(f, h)| algebra_ratio(&f.sample(g), &h.sample(g), &norm)).collect()
    };
    let coarse = ratios_on(grid)?;
    let skipped = coarse.iter().filter(|c| c.is_none()).count();
    if skipped > 0 {
        r.warn(format!("{skipped} pairs with a zero-norm factor skipped"));
    }
    let best = max(coarse.iter().flatten().copied());
    let infinite = if best.is_finite() && skipped < coarse.len() { 0.0 } else { 1.0 };
    r.check(Check::at_most("max_ratio_finite", best, None, infinite, 0.0));
    let fine = if b.refine { Some(ratios_on(grid.refined())?) } else { None };
    let columns: &[&str] = if fine.is_some() { &["pair", "ratio", "ratio_refined"] } else { &["pair", "ratio"] };
    let mut s = Series::new("ratios", columns);
    for (i, c) in coarse.iter().enumerate() {
        let mut row = vec![i as f64, c.unwrap_or(f64::NAN)];
        if let Some(f) = &fine {
            row.push(f[i].unwrap_or(f64::NAN));
        }
        s.push(row);
    }
    if let Some(f) = &fine {
        let refined = max(f.iter().flatten().copied());
        let change = (best - refined).abs() / refined;
        r.check(Check::at_most("refinement", best, Some(refined), change, b.stability));
    }
    r.series.push(s);
    Ok(())
}

fn singular(r: &mut ExperimentReport, osc: &OscillatorSpec, grid: Grid, b: &SingularBlock) -> phaselab::Result<()> {
    let weight = WeightSpec::anharmonic(b.s);
    let admissible = ModulationSpace::new(weight, MixedNormParams::new(b.p, b.q_admissible)).evaluator(osc, &grid)?;
    let trunc = singular_weight_norm(grid, b.alpha, &admissible, b.radius)?;
    let change = trunc.relative_change.abs();
    r.check(Check::at_most("truncation_change", trunc.large, Some(trunc.small), change, b.truncation_tolerance));
    let inadmissible = ModulationSpace::new(weight, MixedNormParams::new(b.p, b.q_inadmissible)).evaluator(osc, &grid)?;
    let growth = singular_frequency_growth(grid, b.alpha, &inadmissible, b.cutoff)?;
    r.check(Check::at_least(
        "frequency_growth",
        growth.large,
        Some(growth.small),
        growth.relative_change,
        b.growth_threshold,
    ));
    // the cutoff scan shows whether growth continues beyond one doubling
    let f = phaselab::estimators::local_singular_part(grid, b.alpha);
    let nyquist = grid.points_per_axis() as f64 / (4.0 * grid.half_width());
    let mut s = Series::new("cutoff_scan", &["cutoff", "norm"]);
    let mut c = b.cutoff / 4.0;
    while c <= nyquist {
        s.push(vec![c, inadmissible.norm_in_band(&f, FrequencyBand { cutoff: Some(c) })?]);
        c *= 2.0;
    }
    r.series.push(s);
    Ok(())
}

/// Band-limited `e^{-|x|²/(2w²)}`.
fn profile(dec: &SpectralDecomposition, width: f64) -> phaselab::Result<FieldSample> {
    let raw = FieldSample::from_real_fn(*dec.grid(), |x| (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp());
    dec.synthesize(&dec.analyze(&raw)?)
}

fn checkpoint_gap(a: &Trajectory, b: &Trajectory) -> phaselab::Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.checkpoints.iter().zip(&b.checkpoints) {
        worst = worst.max(x.field.sub(&y.field)?.norm_l2());
    }
    Ok(worst)
}

fn nlheat(r: &mut ExperimentReport, dec: &SpectralDecomposition, case: &NlheatCase) -> phaselab::Result<()> {
    let osc = oscillator(dec)?;
    let monitor = space(&case.monitor);
    let shape = profile(dec, case.initial.width)?;
    let scale0 = monitor.evaluator(osc, dec.grid())?.norm(&shape)?;
    let template = NonlinearProblemSpec {
        beta: case.beta,
        nu: case.nu,
        coupling: case.coupling.value(),
        kind: case.nonlinearity,
        initial: shape.clone(),
        monitor: monitor.clone(),
    };
    let spec = NonlinearProblemSpec {
        initial: shape.scaled((case.initial.monitored_norm / scale0).into()),
        ..template.clone()
    };
    if let Some(w) = boundary_guard(&spec.initial) {
        r.warn(format!("initial data: {w}"));
    }
    if let NonlinearityKind::Inhomogeneous { alpha } = case.nonlinearity {
        let adm = inhomogeneous_admissibility(osc, case.beta, case.nu, alpha, case.monitor.s, &case.monitor.exponents());
        let failed = adm.conditions.iter().filter(|c| !c.1).count() as f64;
        for (name, ok) in &adm.conditions {
            r.info(format!("admissible: {name}"), if *ok { 1.0 } else { 0.0 });
        }
        r.check(Check::at_most("admissibility_failures", failed, Some(0.0), failed, 0.0));
    }
    let options = PicardOptions {
        tol: case.tolerance,
        max_iter: case.max_iter,
        stride: case.stride,
    };
    let traj = picard_solve(dec, &spec, case.horizon, case.dt, options)?;
    let blown = traj.blow_up.map_or(0.0, |_| 1.0);
    if let Some(t) = traj.blow_up {
        r.warn(format!("monitored norm exceeded the blow-up level at t = {t}"));
    }
    r.check(Check::at_most("blow_up", blown, Some(0.0), blown, 0.0));
    let contraction = traj.max_contraction().unwrap_or(0.0);
    r.check(Check::at_most("contraction", contraction, None, contraction, case.limits.contraction));
    let m0 = traj.monitored[0];
    let growth = traj.sup_monitored() / m0;
    r.check(Check::at_most("sup_monitored", traj.sup_monitored(), Some(case.limits.growth * m0), growth, case.limits.growth));
    let scale = traj.sup_l2();
    let residual = duhamel_residual(&traj, dec, &spec)?;
    r.check(Check::at_most("duhamel_residual", residual, None, residual / scale, case.limits.residual));
    if case.cross_check {
        let etd = etd_evolve(dec, &spec, case.horizon, case.dt, EtdScheme::First, case.stride)?;
        let gap = checkpoint_gap(&traj, &etd)?;
        r.check(Check::at_most("picard_etd_gap", gap, None, gap / (case.dt * scale), case.limits.agreement));
    }
    r.info("initial_monitored_norm", m0);
    r.info("sup_l2", scale);
    r.info("l2_max_increase", max(traj.l2.windows(2).map(|w| (w[1] - w[0]) / w[0])));
    r.info("parity_defect", max(traj.checkpoints.iter().map(|c| c.field.parity_defect())));
    r.info("max_picard_iterations", traj.iterations.iter().copied().max().unwrap_or(0) as f64);
    if let Some(t) = &case.threshold {
        let search = ThresholdSearch {
            lower: t.lower,
            upper: t.upper,
            horizon: t.horizon,
            dt: t.dt,
            resolution: t.resolution,
        };
        match smallness_threshold(dec, &template, search)? {
            Threshold::Found { epsilon, first_failure } => {
                r.info("threshold_epsilon", epsilon);
                r.info("threshold_first_failure", first_failure);
            }
            Threshold::UpperBracket { epsilon } => r.info("threshold_upper_bracket", epsilon),
            Threshold::NoThresholdInRange => r.warn("smallness threshold: the lower bracket already fails"),
        }
    }
    let mut s = Series::new("trajectory", &["t", "monitored_norm", "l2_norm", "blow_up"]);
    for i in 0..traj.times.len() {
        let flag = traj.blow_up.is_some_and(|t| traj.times[i] >= t);
        s.push(vec![traj.times[i], traj.monitored[i], traj.l2[i], if flag { 1.0 } else { 0.0 }]);
    }
    r.series.push(s);
    Ok(())
}

fn conjugation(dec: &SpectralDecomposition, safe_radius: f64) -> phaselab::Result<GaussianConjugation> {
    GaussianConjugation::new(dec.grid().dimension())?.with_safe_radius(safe_radius)
}

fn ou_constant(r: &mut ExperimentReport, dec: &SpectralDecomposition, c: &ConstantCheck, safe_radius: f64) -> phaselab::Result<()> {
    let conj = conjugation(dec, safe_radius)?;
    let grid = *dec.grid();
    let one = FieldSample::from_real_fn(grid, |_| 1.0);
    let d = grid.dimension() as f64;
    let mut worst: f64 = 0.0;
    let mut discarded: f64 = 0.0;
    let mut s = Series::new("constant", &["t", "max_error"]);
    for &t in &c.times {
        let out = ou_semigroup(&conj, dec, 1.0, t, &one)?;
        let expect = (-t * d).exp();
        let err = max((0..grid.node_count())
            .filter(|&i| grid.node_norm(i) <= c.radius)
            .map(|i| (out.field.values()[i] - expect).norm()));
        worst = worst.max(err);
        discarded = discarded.max(out.discarded_mass);
        s.push(vec![t, err]);
    }
    r.check(Check::at_most("constant_decay_error", worst, Some(0.0), worst, c.tolerance));
    r.info("max_discarded_mass", discarded);
    r.series.push(s);
    Ok(())
}

fn ou_probe_fields(dec: &SpectralDecomposition, p: &OuParams, seed: u64) -> Vec<FieldSample> {
    let grid = *dec.grid();
    ou_probes(grid.dimension(), p.probes, seed).iter().map(|q| q.sample(&grid)).collect()
}

fn ou_isometry(r: &mut ExperimentReport, dec: &SpectralDecomposition, p: &OuParams, seed: u64) -> phaselab::Result<()> {
    let osc = oscillator(dec)?;
    let conj = conjugation(dec, p.safe_radius)?;
    let (ws, np) = (p.norm.weight(), p.norm.exponents());
    let evaluator = space(&p.norm).gaussian().evaluator(osc, dec.grid())?;
    let mut mismatches = 0.0;
    let mut s = Series::new("isometry", &["probe", "gaussian_norm", "conjugated_norm"]);
    for (i, f) in ou_probe_fields(dec, p, seed).iter().enumerate() {
        let a = gaussian_modulation_norm(&conj, f, &WindowSpec::Gaussian, &ws, osc, &np)?;
        let b = modulation_norm(&gaussian_multiply(f), &WindowSpec::Gaussian, &ws, osc, &np)?;
        let c = evaluator.norm(f)?;
        if a.to_bits() != b.to_bits() || c.to_bits() != b.to_bits() {
            mismatches += 1.0;
        }
        s.push(vec![i as f64, a, b]);
    }
    r.check(Check::at_most("bit_mismatches", mismatches, Some(0.0), mismatches, 0.0));
    r.series.push(s);
    Ok(())
}

fn ou_rate(r: &mut ExperimentReport, dec: &SpectralDecomposition, beta: f64, p: &OuParams, seed: u64) -> phaselab::Result<()> {
    let osc = oscillator(dec)?;
    let conj = conjugation(dec, p.safe_radius)?;
    let norm = space(&p.norm).gaussian().evaluator(osc, dec.grid())?;
    let fit = ou_longtime_rate(&conj, dec, beta, &p.times, &norm, &ou_probe_fields(dec, p, seed))?;
    r.check(Check::relative("rate", fit.rate, fit.target, p.rate_tolerance));
    r.info("r_squared", fit.r_squared);
    r.info("max_discarded_mass", fit.max_discarded_mass);
    if fit.max_discarded_mass > 1e-10 {
        r.warn(format!("inverse Gaussian multiplier discarded mass {:.3e}", fit.max_discarded_mass));
    }
    r.series.push(rate_series("rate", &fit.times, &fit.ratios, fit.target)?);
    Ok(())
}
