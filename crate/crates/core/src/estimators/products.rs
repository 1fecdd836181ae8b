//! Product estimates and the Sobolev–modulation norm comparison.

use serde::Serialize;

use crate::calculus::sobolev_norm;
use crate::error::{Error, Result};
use crate::model::{MixedNormParams, OscillatorSpec};
use crate::phasespace::{ModulationNorm, ModulationSpace};
use crate::spectral::{FieldSample, SpectralDecomposition};

/// `‖fg‖ / (‖f‖ ‖g‖)`, or `None` when a factor has zero norm.
pub fn algebra_ratio(f: &FieldSample, g: &FieldSample, norm: &ModulationNorm) -> Result<Option<f64>> {
    let (nf, ng) = (norm.norm(f)?, norm.norm(g)?);
    if nf == 0.0 || ng == 0.0 {
        return Ok(None);
    }
    Ok(Some(norm.norm(&f.mul(g)?)? / (nf * ng)))
}

/// Checks `Σ 1/q_i = m - 1 + 1/q₀` and `Σ 1/p_i = 1/p₀` to `1e-12`.
pub fn check_multilinear_exponents(factors: &[MixedNormParams], target: &MixedNormParams) -> Result<()> {
    let m = factors.len() as f64;
    let sq: f64 = factors.iter().map(|e| e.q.reciprocal()).sum();
    let sp: f64 = factors.iter().map(|e| e.p.reciprocal()).sum();
    if (sq - (m - 1.0 + target.q.reciprocal())).abs() > 1e-12 {
        return Err(Error::arg(format!("Σ 1/q_i = {sq} but m - 1 + 1/q₀ = {}", m - 1.0 + target.q.reciprocal())));
    }
    if (sp - target.p.reciprocal()).abs() > 1e-12 {
        return Err(Error::arg(format!("Σ 1/p_i = {sp} but 1/p₀ = {}", target.p.reciprocal())));
    }
    Ok(())
}

/// `‖Π f_i‖_{M^{p₀,q₀}_s} / Π ‖f_i‖_{M^{p_i,q_i}_s}`.
pub fn multilinear_ratio(
    factors: &[FieldSample],
    exponents: &[MixedNormParams],
    target: &MixedNormParams,
    base: &ModulationSpace,
    osc: &OscillatorSpec,
) -> Result<Option<f64>> {
    if factors.is_empty() || factors.len() != exponents.len() {
        return Err(Error::arg("need one exponent pair per factor"));
    }
    check_multilinear_exponents(exponents, target)?;
    let grid = *factors[0].grid();
    let with = |np: &MixedNormParams| {
        ModulationSpace {
            exponents: *np,
            ..base.clone()
        }
        .evaluator(osc, &grid)
    };
    let mut denom = 1.0;
    let mut product = factors[0].clone();
    for (i, (f, np)) in factors.iter().zip(exponents).enumerate() {
        denom *= with(np)?.norm(f)?;
        if i > 0 {
            product = product.mul(f)?;
        }
    }
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some(with(target)?.norm(&product)? / denom))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceBand {
    pub min: f64,
    pub max: f64,
    pub ratios: Vec<f64>,
}

impl EquivalenceBand {
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Range of `‖f‖_{Q^s} / ‖f‖_{M^{2,2}_s}` over the probes.
///
/// `norm` must be an `M^{2,2}_s` evaluator with the same `s`.
pub fn sobolev_modulation_equivalence(
    dec: &SpectralDecomposition,
    s: f64,
    norm: &ModulationNorm,
    probes: &[FieldSample],
) -> Result<EquivalenceBand> {
    let space = norm.space();
    if space.weight.s != s || space.exponents != MixedNormParams::finite(2.0, 2.0)? {
        return Err(Error::arg("equivalence needs the M^{2,2}_s norm with matching s"));
    }
    let ratios = probes
        .iter()
        .map(|f| Ok(sobolev_norm(dec, s, f)? / norm.norm(f)?))
        .collect::<Result<Vec<f64>>>()?;
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Numerical("non-finite or zero norm ratio".into()));
    }
    Ok(EquivalenceBand {
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(0.0, f64::max),
        ratios,
    })
}
