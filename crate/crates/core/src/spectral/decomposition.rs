use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{FieldSample, Grid, OperatorMatrix};
use crate::error::{Error, Result};
use crate::model::OscillatorSpec;
use crate::numerics::{fit_line, pairwise_sum};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_SWEEP_CAP: usize = 100_000;
/// Relative gap below which neighbouring eigenvalues form one cluster.
pub(crate) const CLUSTER_GAP: f64 = 1e-8;

/// Retained eigenpairs of the discretized operator, ascending.
///
/// Eigenvectors are real and orthonormal in `<u, v> = h^d Σ u_i v_i`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    oscillator: Option<OscillatorSpec>,
    grid: Grid,
    eigenvalues: Vec<f64>,
    /// Mode-major: mode `j` occupies `[j * nodes, (j + 1) * nodes)`.
    vectors: Vec<f64>,
}

impl SpectralDecomposition {
    pub(crate) fn from_parts(
        oscillator: Option<OscillatorSpec>,
        grid: Grid,
        eigenvalues: Vec<f64>,
        vectors: Vec<f64>,
    ) -> Result<Self> {
        if vectors.len() != eigenvalues.len() * grid.node_count() {
            return Err(Error::arg("eigenvector storage does not match mode count"));
        }
        Ok(SpectralDecomposition {
            oscillator,
            grid,
            eigenvalues,
            vectors,
        })
    }

    pub fn oscillator(&self) -> Option<&OscillatorSpec> {
        self.oscillator.as_ref()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.eigenvalues[j]
    }

    pub fn ground_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Raw (real) samples of `Φ_j`.
    pub fn mode(&self, j: usize) -> &[f64] {
        let n = self.grid.node_count();
        &self.vectors[j * n..(j + 1) * n]
    }

    pub fn mode_field(&self, j: usize) -> FieldSample {
        let values = self.mode(j).iter().map(|v| Complex64::new(*v, 0.0)).collect();
        FieldSample::new(self.grid, values).expect("mode length matches grid")
    }

    pub(crate) fn raw_vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// Modal coefficients `<f, Φ_j>` of the retained modes.
    pub fn analyze(&self, f: &FieldSample) -> Result<Vec<Complex64>> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid(), self.grid)));
        }
        let h = self.grid.cell_volume();
        let values = f.values();
        Ok((0..self.mode_count())
            .into_par_iter()
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (v, phi) in values.iter().zip(self.mode(j)) {
                    acc += v * *phi;
                }
                acc * h
            })
            .collect())
    }

    /// `Σ_j c_j Φ_j`.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<FieldSample> {
        if coefficients.len() != self.mode_count() {
            return Err(Error::arg(format!(
                "expected {} coefficients, got {}",
                self.mode_count(),
                coefficients.len()
            )));
        }
        let n = self.grid.node_count();
        let values: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, c) in coefficients.iter().enumerate() {
                    acc += c * self.vectors[j * n + i];
                }
                acc
            })
            .collect();
        FieldSample::new(self.grid, values)
    }

    /// Fraction of `‖f‖²` outside the retained modes.
    pub fn discarded_energy_fraction(&self, f: &FieldSample) -> Result<f64> {
        let total = f.norm_l2().powi(2);
        if total == 0.0 {
            return Ok(0.0);
        }
        let coeffs = self.analyze(f)?;
        let kept = pairwise_sum(&coeffs.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>());
        Ok(((total - kept) / total).max(0.0))
    }

    /// Index range `[lo, hi)` of the degeneracy cluster containing mode `j`.
    pub fn cluster_of(&self, j: usize) -> Result<(usize, usize)> {
        if j >= self.mode_count() {
            return Err(Error::arg(format!(
                "mode index {j} out of range (retained {})",
                self.mode_count()
            )));
        }
        let close = |a: f64, b: f64| (a - b).abs() < CLUSTER_GAP * (1.0 + a.abs().max(b.abs()));
        let ev = &self.eigenvalues;
        let mut lo = j;
        while lo > 0 && close(ev[lo - 1], ev[lo]) {
            lo -= 1;
        }
        let mut hi = j + 1;
        while hi < ev.len() && close(ev[hi - 1], ev[hi]) {
            hi += 1;
        }
        Ok((lo, hi))
    }

    /// `max |<Φ_i, Φ_j> - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.mode_count();
        let h = self.grid.cell_volume();
        (0..m)
            .into_par_iter()
            .map(|i| {
                let mut worst = 0.0f64;
                for j in 0..=i {
                    let dot: f64 = self.mode(i).iter().zip(self.mode(j)).map(|(a, b)| a * b).sum::<f64>() * h;
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((dot - target).abs());
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Eigenpairs of `A`, keeping the `m` smallest.
pub fn eigendecompose(op: &OperatorMatrix, m: usize) -> Result<SpectralDecomposition> {
    let nodes = op.grid.node_count();
    if m == 0 || m > nodes {
        return Err(Error::arg(format!("mode count must be in 1..={nodes}, got {m}")));
    }
    let eig = SymmetricEigen::try_new(op.matrix.clone(), EIGEN_EPS, EIGEN_SWEEP_CAP).ok_or(
        Error::EigenNonConvergence {
            size: nodes,
            max_iterations: EIGEN_SWEEP_CAP,
        },
    )?;
    let mut order: Vec<usize> = (0..nodes).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(m);

    let h = op.grid.cell_volume();
    let scale = 1.0 / h.sqrt();
    let eigenvalues: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    let mut vectors = Vec::with_capacity(m * nodes);
    for &c in &order {
        let col = eig.eigenvectors.column(c);
        let sign = sign_convention(col.as_slice());
        vectors.extend(col.iter().map(|v| sign * v * scale));
    }

    if op.oscillator.is_some() && !(eigenvalues[0] > 0.0) {
        return Err(Error::Numerical(format!(
            "smallest eigenvalue {} is not positive",
            eigenvalues[0]
        )));
    }
    let mut dec = SpectralDecomposition {
        oscillator: op.oscillator.clone(),
        grid: op.grid,
        eigenvalues,
        vectors,
    };
    reorthonormalize_clusters(&mut dec);
    Ok(dec)
}

/// First component with magnitude above 1e-3 of the max is made positive.
fn sign_convention(v: &[f64]) -> f64 {
    let max = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    match v.iter().find(|x| x.abs() > 1e-3 * max) {
        Some(x) if *x < 0.0 => -1.0,
        _ => 1.0,
    }
}

/// Modified Gram–Schmidt inside each degeneracy cluster.
fn reorthonormalize_clusters(dec: &mut SpectralDecomposition) {
    let n = dec.grid.node_count();
    let h = dec.grid.cell_volume();
    let m = dec.mode_count();
    let mut j = 0;
    while j < m {
        let (lo, hi) = dec.cluster_of(j).expect("index in range");
        if hi - lo > 1 {
            for a in lo..hi {
                for b in lo..a {
                    let (head, tail) = dec.vectors.split_at_mut(a * n);
                    let vb = &head[b * n..(b + 1) * n];
                    let va = &mut tail[..n];
                    let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum::<f64>() * h;
                    for (x, y) in va.iter_mut().zip(vb) {
                        *x -= dot * y;
                    }
                }
                let va = &mut dec.vectors[a * n..(a + 1) * n];
                let norm = (va.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
                for x in va.iter_mut() {
                    *x /= norm;
                }
            }
        }
        j = hi;
    }
}

/// Power-law fit of `λ_j` against `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `2kl / (d (k + l))`.
    pub target: f64,
    pub relative_deviation: f64,
    pub j_lo: usize,
    pub j_hi: usize,
}

/// Least-squares slope of `log λ_j` against `log j` over `j_lo..=j_hi`.
pub fn eigenvalue_growth_fit(dec: &SpectralDecomposition, j_lo: usize, j_hi: usize) -> Result<GrowthFit> {
    let osc = dec
        .oscillator()
        .ok_or_else(|| Error::arg("growth fit needs an oscillator-backed decomposition"))?;
    if j_hi < j_lo || j_hi + 1 - j_lo < 20 {
        return Err(Error::arg(format!("window [{j_lo}, {j_hi}] has fewer than 20 points")));
    }
    if j_lo < 20 {
        return Err(Error::arg(format!("j_lo must be at least 20, got {j_lo}")));
    }
    if (j_hi as f64) > 0.4 * dec.mode_count() as f64 {
        return Err(Error::arg(format!(
            "j_hi = {j_hi} exceeds 0.4 x retained modes ({})",
            dec.mode_count()
        )));
    }
    let xs: Vec<f64> = (j_lo..=j_hi).map(|j| (j as f64).ln()).collect();
    let ys: Vec<f64> = (j_lo..=j_hi).map(|j| dec.eigenvalue(j).ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let (k, l, d) = (osc.k() as f64, osc.l() as f64, osc.dimension() as f64);
    let target = 2.0 * k * l / (d * (k + l));
    Ok(GrowthFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        target,
        relative_deviation: (fit.slope - target).abs() / target,
        j_lo,
        j_hi,
    })
}
