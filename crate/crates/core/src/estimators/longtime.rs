//! Long-time decay: probe lower bounds on the semigroup norm and the
//! spectral sum.

use serde::Serialize;

use crate::calculus::{heat_semigroup, SemigroupQuery};
use crate::error::{Error, Result};
use crate::numerics::{fit_line, pairwise_sum};
use crate::phasespace::ModulationNorm;
use crate::spectral::{FieldSample, SpectralDecomposition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeBound {
    /// `max_f ‖e^{-tH^β} f‖_target / ‖f‖_source`.
    pub value: f64,
    pub argmax: usize,
    pub warnings: Vec<String>,
}

/// Source norms of each probe, `None` where the norm vanishes.
pub fn source_norms(source: &ModulationNorm, probes: &[FieldSample]) -> Result<Vec<Option<f64>>> {
    probes
        .iter()
        .map(|f| {
            let n = source.norm(f)?;
            Ok((n > 0.0).then_some(n))
        })
        .collect()
}

/// Empirical lower bound for the `source → target` operator norm.
pub fn probe_operator_bound(
    dec: &SpectralDecomposition,
    beta: f64,
    t: f64,
    source: &ModulationNorm,
    target: &ModulationNorm,
    probes: &[FieldSample],
) -> Result<ProbeBound> {
    let norms = source_norms(source, probes)?;
    probe_bound_with(dec, beta, t, target, probes, &norms)
}

/// As [`probe_operator_bound`] with precomputed source norms.
pub fn probe_bound_with(
    dec: &SpectralDecomposition,
    beta: f64,
    t: f64,
    target: &ModulationNorm,
    probes: &[FieldSample],
    source_norms: &[Option<f64>],
) -> Result<ProbeBound> {
    let q = SemigroupQuery::new(dec, beta, t)?;
    let mut best: Option<(f64, usize)> = None;
    let mut warnings = Vec::new();
    for (i, (f, n)) in probes.iter().zip(source_norms).enumerate() {
        let Some(n) = n else {
            warnings.push(format!("probe {i} has zero source norm; skipped"));
            continue;
        };
        let ratio = target.norm(&heat_semigroup(&q, f)?)? / n;
        if best.is_none_or(|(b, _)| ratio > b) {
            best = Some((ratio, i));
        }
    }
    let (value, argmax) = best.ok_or_else(|| Error::arg("no probe with a nonzero source norm"))?;
    Ok(ProbeBound { value, argmax, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub times: Vec<f64>,
    pub bounds: Vec<f64>,
    pub rate: f64,
    /// `-λ_0^β`.
    pub target: f64,
    pub relative_deviation: f64,
    pub r_squared: f64,
}

/// Slope of `log probe_bound(t)` against `t`.
pub fn longtime_rate(
    dec: &SpectralDecomposition,
    beta: f64,
    times: &[f64],
    source: &ModulationNorm,
    target: &ModulationNorm,
    probes: &[FieldSample],
) -> Result<RateFit> {
    let s1 = source.space().weight.s;
    let s2 = target.space().weight.s;
    if s1 != s2 || s1 < 0.0 {
        return Err(Error::arg("long-time rate requires equal source and target s >= 0"));
    }
    let norms = source_norms(source, probes)?;
    let bounds = times
        .iter()
        .map(|&t| Ok(probe_bound_with(dec, beta, t, target, probes, &norms)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let logs: Vec<f64> = bounds.iter().map(|b| b.ln()).collect();
    let fit = fit_line(times, &logs)?;
    let target_rate = -dec.ground_eigenvalue().powf(beta);
    Ok(RateFit {
        times: times.to_vec(),
        bounds,
        rate: fit.slope,
        target: target_rate,
        relative_deviation: (fit.slope - target_rate).abs() / target_rate.abs(),
        r_squared: fit.r_squared,
    })
}

/// `(Σ_j e^{-tλ_j^β} λ_j^{s₀}, ratio to e^{-tλ_0^β})`.
pub fn spectral_sum_bound(dec: &SpectralDecomposition, beta: f64, s0: f64, t: f64) -> Result<(f64, f64)> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::arg(format!("spectral sum bound needs t >= 1, got {t}")));
    }
    if s0 < 0.0 {
        return Err(Error::arg("s0 must be nonnegative"));
    }
    let ground = dec.ground_eigenvalue().powf(beta);
    // the ratio is summed with the ground factor removed, so it stays
    // finite where the raw sum underflows
    let terms: Vec<f64> = dec
        .eigenvalues()
        .iter()
        .map(|&l| (-t * (l.powf(beta) - ground)).exp() * if s0 == 0.0 { 1.0 } else { l.powf(s0) })
        .collect();
    let ratio = pairwise_sum(&terms);
    Ok((ratio * (-t * ground).exp(), ratio))
}
