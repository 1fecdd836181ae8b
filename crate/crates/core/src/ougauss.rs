//! Gaussian conjugation and the Ornstein–Uhlenbeck semigroup.
//!
//! `M_γ f = γ^{1/2} f` carries the Hermite operator to the OU operator,
//! `M_γ L M_γ^{-1} = H`, so `e^{-tL^β} = M_γ^{-1} e^{-tH^β} M_γ`. There is
//! no direct OU discretization: the semigroup exists here only through
//! that identity.

use serde::{Deserialize, Serialize};

use crate::calculus::{heat_semigroup, SemigroupQuery};
use crate::error::{Error, Result};
use crate::model::{MixedNormParams, OscillatorSpec, WeightSpec};
use crate::numerics::{fit_line, pairwise_sum};
use crate::phasespace::{gaussian_half_density, gaussian_multiply, modulation_norm, ModulationNorm, WindowSpec};
use crate::spectral::{FieldSample, Grid, SpectralDecomposition};

/// Default radius beyond which the inverse multiplier is not applied.
pub const DEFAULT_SAFE_RADIUS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// multiply by `γ^{1/2}`
    Forward,
    /// multiply by `γ^{-1/2}`
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianConjugation {
    pub dimension: usize,
    /// Nodes with `|x|` above this are zeroed by the inverse multiplier.
    pub safe_radius: f64,
}

/// A conjugated field together with the L² norm of what was zeroed.
#[derive(Debug, Clone)]
pub struct Conjugated {
    pub field: FieldSample,
    pub discarded_mass: f64,
}

impl GaussianConjugation {
    pub fn new(dimension: usize) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::arg(format!("dimension must be 1 or 2, got {dimension}")));
        }
        Ok(GaussianConjugation {
            dimension,
            safe_radius: DEFAULT_SAFE_RADIUS,
        })
    }

    pub fn with_safe_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::arg("safe radius must be positive"));
        }
        self.safe_radius = r;
        Ok(self)
    }

    /// `γ(x) = π^{-d/2} e^{-|x|²}`
    pub fn density(&self, x: &[f64]) -> f64 {
        gaussian_half_density(x).powi(2)
    }

    fn check(&self, f: &FieldSample) -> Result<()> {
        if f.grid().dimension() != self.dimension {
            return Err(Error::GridMismatch(format!(
                "conjugation is {}-dimensional, field is {}-dimensional",
                self.dimension,
                f.grid().dimension()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, direction: Direction, f: &FieldSample) -> Result<Conjugated> {
        self.check(f)?;
        match direction {
            Direction::Forward => Ok(Conjugated {
                field: gaussian_multiply(f),
                discarded_mass: 0.0,
            }),
            Direction::Inverse => {
                let grid = *f.grid();
                let d = grid.dimension();
                let mut dropped = Vec::new();
                let values = f
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        if grid.node_norm(i) > self.safe_radius {
                            dropped.push(v.norm_sqr());
                            0.0.into()
                        } else {
                            v / gaussian_half_density(&grid.node(i)[..d])
                        }
                    })
                    .collect();
                Ok(Conjugated {
                    field: FieldSample::new(grid, values)?,
                    discarded_mass: (grid.cell_volume() * pairwise_sum(&dropped)).sqrt(),
                })
            }
        }
    }
}

pub fn apply_conjugation(c: &GaussianConjugation, direction: Direction, f: &FieldSample) -> Result<Conjugated> {
    c.apply(direction, f)
}

fn check_hermite(c: &GaussianConjugation, dec: &SpectralDecomposition) -> Result<()> {
    match dec.oscillator() {
        Some(osc) if osc.is_hermite() && osc.dimension() == c.dimension => Ok(()),
        _ => Err(Error::arg("the OU semigroup needs the Hermite decomposition of matching dimension")),
    }
}

/// `e^{-tL^β} f = M_γ^{-1} e^{-tH^β} M_γ f`.
pub fn ou_semigroup(
    c: &GaussianConjugation,
    dec: &SpectralDecomposition,
    beta: f64,
    t: f64,
    f: &FieldSample,
) -> Result<Conjugated> {
    check_hermite(c, dec)?;
    let query = SemigroupQuery::new(dec, beta, t)?;
    let forward = c.apply(Direction::Forward, f)?;
    let evolved = heat_semigroup(&query, &forward.field)?;
    let out = c.apply(Direction::Inverse, &evolved)?;
    #[cfg(debug_assertions)]
    {
        let again = c.apply(Direction::Inverse, &heat_semigroup(&query, &gaussian_multiply(f))?)?;
        let gap = out.field.sub(&again.field)?.norm_l2();
        debug_assert!(gap == 0.0, "intertwining identity broken: {gap:e}");
    }
    Ok(out)
}

/// `‖f‖_{M^{p,q}_{γ,s}} = ‖M_γ f‖_{M^{p,q}_s}`.
pub fn gaussian_modulation_norm(
    c: &GaussianConjugation,
    f: &FieldSample,
    window: &WindowSpec,
    weight: &WeightSpec,
    osc: &OscillatorSpec,
    np: &MixedNormParams,
) -> Result<f64> {
    c.check(f)?;
    modulation_norm(&gaussian_multiply(f), window, weight, osc, np)
}

/// The probe `e^{c·x - w|x|²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianProbe {
    pub tilt: [f64; 2],
    pub width: f64,
}

impl GaussianProbe {
    pub fn sample(&self, grid: &Grid) -> FieldSample {
        let d = grid.dimension();
        FieldSample::from_real_fn(*grid, |x| {
            let lin: f64 = (0..d).map(|i| self.tilt[i] * x[i]).sum();
            let r2: f64 = x[..d].iter().map(|v| v * v).sum();
            (lin - self.width * r2).exp()
        })
    }
}

/// Probes with tilts in `[-2, 2]` and widths in `[0, 1/4]`; the constant
/// function is always the first one.
pub fn ou_probes(dimension: usize, count: usize, seed: u64) -> Vec<GaussianProbe> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![GaussianProbe {
        tilt: [0.0; 2],
        width: 0.0,
    }];
    while out.len() < count {
        let mut tilt = [0.0; 2];
        for v in tilt.iter_mut().take(dimension) {
            *v = rng.random_range(-2.0..=2.0);
        }
        out.push(GaussianProbe {
            tilt,
            width: rng.random_range(0.0..=0.25),
        });
    }
    out.truncate(count);
    out
}

/// Fitted long-time decay of `sup_f ‖e^{-tL^β} f‖_γ / ‖f‖_γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuRateFit {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub rate: f64,
    pub target: f64,
    pub relative_deviation: f64,
    pub r_squared: f64,
    pub max_discarded_mass: f64,
}

/// Log-slope of the worst probe ratio in the Gaussian norm; the target is
/// `-d^β`.
pub fn ou_longtime_rate(
    c: &GaussianConjugation,
    dec: &SpectralDecomposition,
    beta: f64,
    times: &[f64],
    norm: &ModulationNorm,
    probes: &[FieldSample],
) -> Result<OuRateFit> {
    check_hermite(c, dec)?;
    if times.len() < 3 || probes.is_empty() {
        return Err(Error::arg("need at least 3 times and one probe"));
    }
    if !norm.space().gaussian {
        return Err(Error::arg("the rate is measured in a Gaussian modulation norm"));
    }
    let sources: Vec<f64> = probes.iter().map(|f| norm.norm(f)).collect::<Result<_>>()?;
    let mut ratios = Vec::with_capacity(times.len());
    let mut discarded = 0.0f64;
    for &t in times {
        let mut worst = 0.0f64;
        for (f, &s) in probes.iter().zip(&sources) {
            let out = ou_semigroup(c, dec, beta, t, f)?;
            discarded = discarded.max(out.discarded_mass);
            worst = worst.max(norm.norm(&out.field)? / s);
        }
        ratios.push(worst);
    }
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let fit = fit_line(times, &logs)?;
    let target = -(c.dimension as f64).powf(beta);
    Ok(OuRateFit {
        times: times.to_vec(),
        ratios,
        rate: fit.slope,
        target,
        relative_deviation: ((fit.slope - target) / target).abs(),
        r_squared: fit.r_squared,
        max_discarded_mass: discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{assemble_operator, eigendecompose};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(1, 128, 10.0).unwrap()
    }

    #[test]
    fn conjugation_examples() {
        let c = GaussianConjugation::new(1).unwrap();
        let g = grid();
        let one = FieldSample::from_real_fn(g, |_| 1.0);
        let fwd = c.apply(Direction::Forward, &one).unwrap();
        for (i, v) in fwd.field.values().iter().enumerate() {
            let x = g.node(i)[0];
            assert!((v.re - PI.powf(-0.25) * (-x * x / 2.0).exp()).abs() < 1e-15);
        }
        let back = c.apply(Direction::Inverse, &fwd.field).unwrap();
        for (i, v) in back.field.values().iter().enumerate() {
            if g.node_norm(i) <= c.safe_radius {
                assert!((v - 1.0).norm() < 1e-12);
            } else {
                assert_eq!(v.norm(), 0.0);
            }
        }
        assert!(back.discarded_mass > 0.0 && back.discarded_mass < 1e-10);

        let inv_half = FieldSample::from_real_fn(g, |x| 1.0 / gaussian_half_density(x));
        let unit = c.apply(Direction::Forward, &inv_half).unwrap().field;
        assert!(unit.values().iter().all(|v| (v - 1.0).norm() < 1e-12));
    }

    #[test]
    fn density_and_radius() {
        let c = GaussianConjugation::new(2).unwrap();
        assert!((c.density(&[0.0, 0.0]) - 1.0 / PI).abs() < 1e-15);
        assert!(GaussianConjugation::new(3).is_err());
        assert!(c.with_safe_radius(0.0).is_err());
        let f = FieldSample::from_real_fn(grid(), |_| 1.0);
        assert!(c.apply(Direction::Forward, &f).is_err());
    }

    #[test]
    fn half_density_matches_ground_state() {
        let g = grid();
        let dec = eigendecompose(&assemble_operator(&OscillatorSpec::hermite(1), &g).unwrap(), 8).unwrap();
        let profile = FieldSample::from_real_fn(g, gaussian_half_density);
        let profile = profile.scaled((1.0 / profile.norm_l2()).into());
        let phi0 = dec.mode_field(0);
        assert!(profile.sub(&phi0).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn non_hermite_decomposition_is_rejected() {
        let g = grid();
        let dec = eigendecompose(&assemble_operator(&OscillatorSpec::anharmonic(1, 2, 1), &g).unwrap(), 8).unwrap();
        let c = GaussianConjugation::new(1).unwrap();
        let f = FieldSample::from_real_fn(g, |_| 1.0);
        assert!(ou_semigroup(&c, &dec, 1.0, 0.5, &f).is_err());
    }

    #[test]
    fn probes_start_with_constant() {
        let p = ou_probes(1, 5, 7);
        assert_eq!(p.len(), 5);
        assert_eq!(p[0].width, 0.0);
        assert!(p.iter().all(|q| (0.0..=0.25).contains(&q.width) && q.tilt[0].abs() <= 2.0 && q.tilt[1] == 0.0));
        assert_eq!(p, ou_probes(1, 5, 7));
    }
}
