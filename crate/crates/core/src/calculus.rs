//! Functions of the discretized operator through its eigendecomposition.
//!
//! Every operation acts on the component of the input spanned by the
//! retained modes; energy outside that span is dropped. Callers that care
//! can query [`SpectralDecomposition::discarded_energy_fraction`] first.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;
use crate::spectral::{FieldSample, SpectralDecomposition};

/// `Σ_j φ(λ_j) <f, Φ_j> Φ_j` over the retained modes.
pub fn apply_spectral_function<F>(dec: &SpectralDecomposition, phi: F, f: &FieldSample) -> Result<FieldSample>
where
    F: Fn(f64) -> f64,
{
    let multipliers = multipliers(dec, phi)?;
    let mut coeffs = dec.analyze(f)?;
    for (c, m) in coeffs.iter_mut().zip(&multipliers) {
        *c *= *m;
    }
    dec.synthesize(&coeffs)
}

/// `φ(λ_j)` for every retained mode, rejecting non-finite values.
pub fn multipliers<F: Fn(f64) -> f64>(dec: &SpectralDecomposition, phi: F) -> Result<Vec<f64>> {
    dec.eigenvalues()
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let v = phi(lambda);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Numerical(format!("spectral function is {v} at mode {j} (λ = {lambda})")))
            }
        })
        .collect()
}

/// `e^{-t λ^β}` with underflow flushed to zero.
pub fn heat_multiplier(lambda: f64, beta: f64, t: f64) -> f64 {
    let v = (-t * lambda.powf(beta)).exp();
    if v < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

/// The heat semigroup `e^{-tH^β}` at one time.
#[derive(Debug, Clone, Copy)]
pub struct SemigroupQuery<'a> {
    dec: &'a SpectralDecomposition,
    beta: f64,
    t: f64,
}

impl<'a> SemigroupQuery<'a> {
    pub fn new(dec: &'a SpectralDecomposition, beta: f64, t: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::arg(format!("beta must be positive, got {beta}")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::arg(format!("time must be finite and nonnegative, got {t}")));
        }
        Ok(SemigroupQuery { dec, beta, t })
    }

    pub fn decomposition(&self) -> &'a SpectralDecomposition {
        self.dec
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Modal multipliers `e^{-t λ_j^β}`.
    pub fn multipliers(&self) -> Vec<f64> {
        self.dec
            .eigenvalues()
            .iter()
            .map(|&l| heat_multiplier(l, self.beta, self.t))
            .collect()
    }
}

pub fn heat_semigroup(q: &SemigroupQuery<'_>, f: &FieldSample) -> Result<FieldSample> {
    let (beta, t) = (q.beta, q.t);
    apply_spectral_function(q.dec, |l| heat_multiplier(l, beta, t), f)
}

/// `H^β f`; `β = 0` is the projection onto the retained modes.
pub fn fractional_power(dec: &SpectralDecomposition, beta: f64, f: &FieldSample) -> Result<FieldSample> {
    if !beta.is_finite() {
        return Err(Error::arg("fractional power must be finite"));
    }
    apply_spectral_function(dec, |l| if beta == 0.0 { 1.0 } else { l.powf(beta) }, f)
}

/// Orthogonal projection onto the eigenspace (degeneracy cluster) of mode `j`.
pub fn project(dec: &SpectralDecomposition, j: usize, f: &FieldSample) -> Result<FieldSample> {
    let (lo, hi) = dec.cluster_of(j)?;
    let coeffs: Vec<Complex64> = dec
        .analyze(f)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| if (lo..hi).contains(&i) { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    dec.synthesize(&coeffs)
}

/// `(Σ_j λ_j^s ‖P_j f‖²)^{1/2}` over the retained modes.
pub fn sobolev_norm(dec: &SpectralDecomposition, s: f64, f: &FieldSample) -> Result<f64> {
    let coeffs = dec.analyze(f)?;
    let terms: Vec<f64> = coeffs
        .iter()
        .zip(dec.eigenvalues())
        .map(|(c, &l)| if s == 0.0 { c.norm_sqr() } else { l.powf(s) * c.norm_sqr() })
        .collect();
    Ok(pairwise_sum(&terms).sqrt())
}
