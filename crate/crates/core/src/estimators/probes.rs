//! Deterministic probe families.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{FieldSample, Grid, SpectralDecomposition};

pub const DEFAULT_PROBE_SEED: u64 = 0x5eed_0001;

/// A modulated Gaussian `e^{-|x-c|²/(2w²)} e^{2πi ξ₀·x}`, unit L² norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: [f64; 2],
    pub width: f64,
    pub modulation: [f64; 2],
}

impl GaussianPacket {
    pub fn sample(&self, grid: Grid) -> FieldSample {
        let d = grid.dimension();
        let f = FieldSample::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for a in 0..d {
                r2 += (x[a] - self.center[a]).powi(2);
                phase += 2.0 * PI * self.modulation[a] * x[a];
            }
            Complex64::from_polar((-r2 / (2.0 * self.width * self.width)).exp(), phase)
        });
        let n = f.norm_l2();
        f.scaled((1.0 / n).into())
    }
}

/// Centers in `[-3, 3]^d`, widths in `[1/2, 2]`, modulations in `[-2, 2]^d`.
pub fn random_packets(dimension: usize, count: usize, seed: u64) -> Vec<GaussianPacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut center = [0.0; 2];
            let mut modulation = [0.0; 2];
            for a in 0..dimension {
                center[a] = rng.random_range(-3.0..=3.0);
            }
            let width = rng.random_range(0.5..=2.0);
            for a in 0..dimension {
                modulation[a] = rng.random_range(-2.0..=2.0);
            }
            GaussianPacket {
                center,
                width,
                modulation,
            }
        })
        .collect()
}

/// `gaussians` random packets followed by the first `eigen` eigenfunctions.
pub fn mixed_corpus(dec: &SpectralDecomposition, gaussians: usize, eigen: usize, seed: u64) -> Vec<FieldSample> {
    let grid = *dec.grid();
    random_packets(grid.dimension(), gaussians, seed)
        .iter()
        .map(|p| p.sample(grid))
        .chain((0..eigen.min(dec.mode_count())).map(|j| dec.mode_field(j)))
        .collect()
}

/// 30 packets plus 10 eigenfunctions.
pub fn probe_corpus(dec: &SpectralDecomposition, seed: u64) -> Vec<FieldSample> {
    mixed_corpus(dec, 30, 10, seed)
}

/// 40 packets plus 10 eigenfunctions.
pub fn fifty_probe_family(dec: &SpectralDecomposition, seed: u64) -> Vec<FieldSample> {
    mixed_corpus(dec, 40, 10, seed)
}

/// Pairs of independent packets.
pub fn packet_pairs(dimension: usize, count: usize, seed: u64) -> Vec<(GaussianPacket, GaussianPacket)> {
    let all = random_packets(dimension, 2 * count, seed);
    all.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Projection onto the retained modes.
pub fn band_limit(dec: &SpectralDecomposition, f: &FieldSample) -> FieldSample {
    dec.synthesize(&dec.analyze(f).expect("probe on decomposition grid"))
        .expect("coefficient count matches")
}
