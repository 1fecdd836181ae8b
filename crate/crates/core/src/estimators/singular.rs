//! Modulation norms of the singular weight `|x|^{-α}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::phasespace::{FrequencyBand, ModulationNorm};
use crate::spectral::{FieldSample, Grid};

/// `|x|^{-α}` on `|x| ≤ radius`, zero outside.
pub fn truncated_singular_weight(grid: Grid, alpha: f64, radius: f64) -> FieldSample {
    FieldSample::from_real_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r > 0.0, "staggered grid never contains the origin");
        if r <= radius {
            r.powf(-alpha)
        } else {
            0.0
        }
    })
}

/// Local part `|x|^{-α} e^{-|x|⁸}`, which carries all frequency-side
/// behavior of the singularity.
pub fn local_singular_part(grid: Grid, alpha: f64) -> FieldSample {
    FieldSample::from_real_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r.powf(-alpha) * (-r.powi(8)).exp()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationTrend {
    pub small: f64,
    pub large: f64,
    /// `(large - small) / small`.
    pub relative_change: f64,
}

fn trend(small: f64, large: f64) -> TruncationTrend {
    TruncationTrend {
        small,
        large,
        relative_change: (large - small) / small,
    }
}

/// Norm of the weight truncated at `R/2` and at `R`.
pub fn singular_weight_norm(grid: Grid, alpha: f64, norm: &ModulationNorm, radius: f64) -> Result<TruncationTrend> {
    if !(alpha > 0.0) {
        return Err(Error::arg("alpha must be positive"));
    }
    if norm.space().weight.s < 0.0 {
        return Err(Error::arg("singular weight norm expects s >= 0"));
    }
    if radius > grid.half_width() {
        return Err(Error::arg(format!("radius {radius} exceeds the grid half width")));
    }
    let small = norm.norm(&truncated_singular_weight(grid, alpha, radius / 2.0))?;
    let large = norm.norm(&truncated_singular_weight(grid, alpha, radius))?;
    Ok(trend(small, large))
}

/// Norm of the local part with the frequency sum cut at `cutoff` and at
/// `2 cutoff` (cycles per unit length).
pub fn singular_frequency_growth(grid: Grid, alpha: f64, norm: &ModulationNorm, cutoff: f64) -> Result<TruncationTrend> {
    let nyquist = grid.points_per_axis() as f64 / (4.0 * grid.half_width());
    if 2.0 * cutoff > nyquist {
        return Err(Error::arg(format!("doubled cutoff {} exceeds the lattice limit {nyquist}", 2.0 * cutoff)));
    }
    let f = local_singular_part(grid, alpha);
    let small = norm.norm_in_band(&f, FrequencyBand { cutoff: Some(cutoff) })?;
    let large = norm.norm_in_band(&f, FrequencyBand { cutoff: Some(2.0 * cutoff) })?;
    Ok(trend(small, large))
}
