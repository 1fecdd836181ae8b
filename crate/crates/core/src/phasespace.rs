//! Short-time Fourier transform and weighted mixed norms.
//!
//! Convention: `V_g f(x, ξ) = ∫ f(z) conj(g(z - x)) e^{-2πi ξ·z} dz`, so
//! `ξ` is measured in cycles per unit length. The operator symbol uses the
//! angular frequency `ω = 2πξ`, and weights are always evaluated at `ω`.
//! This module is the only place where that conversion happens.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{weight_value, MixedNormParams, OscillatorSpec, WeightKind, WeightSpec};
use crate::numerics::pairwise_sum;
use crate::spectral::{fft_in_place, FieldSample, Grid};

/// Analysis window for the STFT.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowSpec {
    /// `g(z) = 2^{d/4} e^{-π|z|²}`, normalized to unit discrete L² norm.
    Gaussian,
    /// Values on the offset lattice: entry `i` holds `g(δ)` where `δ` is the
    /// signed offset `k·h` of the FFT-ordered per-axis indices of node `i`.
    Custom(FieldSample),
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec::Gaussian
    }
}

impl WindowSpec {
    /// Window samples at every cyclic offset, FFT-ordered.
    pub fn offset_samples(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        match self {
            WindowSpec::Gaussian => {
                let d = grid.dimension();
                let h = grid.spacing();
                let raw: Vec<f64> = (0..grid.node_count())
                    .map(|i| {
                        let r2: f64 = offset_index(grid, i)[..d]
                            .iter()
                            .map(|&k| (k as f64 * h).powi(2))
                            .sum();
                        (-PI * r2).exp()
                    })
                    .collect();
                // 2^{d/4} up to the lattice aliasing error, which is only
                // visible on coarse grids (h ≳ 0.3)
                let sq: Vec<f64> = raw.iter().map(|v| v * v).collect();
                let norm = 1.0 / (grid.cell_volume() * pairwise_sum(&sq)).sqrt();
                Ok(raw.into_iter().map(|v| Complex64::new(norm * v, 0.0)).collect())
            }
            WindowSpec::Custom(g) => {
                if g.grid() != grid {
                    return Err(Error::GridMismatch("custom window is on a different grid".into()));
                }
                Ok(g.values().to_vec())
            }
        }
    }

    /// Discrete `‖g‖₂` on the offset lattice.
    pub fn norm_l2(&self, grid: &Grid) -> Result<f64> {
        let g = self.offset_samples(grid)?;
        let sq: Vec<f64> = g.iter().map(|v| v.norm_sqr()).collect();
        Ok((grid.cell_volume() * pairwise_sum(&sq)).sqrt())
    }
}

fn offset_index(grid: &Grid, i: usize) -> [i64; 2] {
    let [a, b] = grid.axis_indices(i);
    [grid.signed_frequency_index(a), grid.signed_frequency_index(b)]
}

/// Flat FFT-ordered offset index of `m - i` (per axis, cyclic).
fn cyclic_offset(grid: &Grid, m: usize, i: usize) -> usize {
    let n = grid.points_per_axis();
    let [ma, mb] = grid.axis_indices(m);
    let [ia, ib] = grid.axis_indices(i);
    match grid.dimension() {
        1 => (ma + n - ia) % n,
        _ => ((ma + n - ia) % n) * n + (mb + n - ib) % n,
    }
}

/// Sampled STFT on the lattice (grid nodes) × (frequencies `n/(2L)`).
///
/// Storage is x-major: entry `x * N^d + k` holds the value at node `x` and
/// frequency index `k`, where frequency indices ascend from `-N/2` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl PhaseSpaceField {
    /// Wraps raw values in the x-major, ascending-frequency layout.
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        let nodes = grid.node_count();
        if values.len() != nodes * nodes {
            return Err(Error::arg(format!("expected {} lattice values, got {}", nodes * nodes, values.len())));
        }
        Ok(PhaseSpaceField { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x: usize, k: usize) -> Complex64 {
        self.values[x * self.grid.node_count() + k]
    }

    /// `ξ` (cycles per unit length) at ascending frequency index `k`.
    pub fn frequency(&self, k: usize) -> [f64; 2] {
        frequency_at(&self.grid, k)
    }

    /// Lattice cell area `h^d (1/2L)^d`.
    pub fn cell_area(&self) -> f64 {
        self.grid.cell_volume() * frequency_cell(&self.grid)
    }

    /// Plain lattice L² norm.
    pub fn norm_l2(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        (self.cell_area() * pairwise_sum(&sq)).sqrt()
    }

    pub fn metadata(&self) -> LatticeMetadata {
        LatticeMetadata {
            dimension: self.grid.dimension(),
            points_per_axis: self.grid.points_per_axis(),
            half_width: self.grid.half_width(),
            x_spacing: self.grid.spacing(),
            xi_spacing: 1.0 / (2.0 * self.grid.half_width()),
            cell_area: self.cell_area(),
            convention: "V_g f(x,xi) = sum_z h^d f(z) conj(g(z-x)) exp(-2 pi i xi.z)".into(),
        }
    }

    /// CSV rows `x.., xi.., re, im, abs` plus a JSON sidecar `<stem>.json`.
    pub fn export(&self, dir: &Path, stem: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::Numerical(format!("export failed: {e}"));
        let d = self.grid.dimension();
        let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.csv"))).map_err(io)?);
        let header = if d == 1 { "x,xi,re,im,abs" } else { "x1,x2,xi1,xi2,re,im,abs" };
        writeln!(out, "{header}").map_err(io)?;
        let nodes = self.grid.node_count();
        for x in 0..nodes {
            let p = self.grid.node(x);
            for k in 0..nodes {
                let xi = self.frequency(k);
                let v = self.get(x, k);
                let coords: Vec<String> = p[..d].iter().chain(&xi[..d]).map(|c| c.to_string()).collect();
                writeln!(out, "{},{},{},{}", coords.join(","), v.re, v.im, v.norm()).map_err(io)?;
            }
        }
        out.flush().map_err(io)?;
        let json = serde_json::to_string_pretty(&self.metadata()).map_err(|e| Error::Numerical(e.to_string()))?;
        std::fs::write(dir.join(format!("{stem}.json")), json).map_err(io)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeMetadata {
    pub dimension: usize,
    pub points_per_axis: usize,
    pub half_width: f64,
    pub x_spacing: f64,
    pub xi_spacing: f64,
    pub cell_area: f64,
    pub convention: String,
}

fn frequency_cell(grid: &Grid) -> f64 {
    (1.0 / (2.0 * grid.half_width())).powi(grid.dimension() as i32)
}

fn frequency_at(grid: &Grid, k: usize) -> [f64; 2] {
    let n = grid.points_per_axis();
    let half = (n / 2) as f64;
    let step = 1.0 / (2.0 * grid.half_width());
    let [a, b] = grid.axis_indices(k);
    match grid.dimension() {
        1 => [(a as f64 - half) * step, 0.0],
        _ => [(a as f64 - half) * step, (b as f64 - half) * step],
    }
}

/// Ascending frequency index of FFT output slot `j` (per axis).
fn ascending_slot(grid: &Grid, j: usize) -> usize {
    let n = grid.points_per_axis();
    let [a, b] = grid.axis_indices(j);
    let shift = |c: usize| (c + n / 2) % n;
    match grid.dimension() {
        1 => shift(a),
        _ => shift(a) * n + shift(b),
    }
}

/// `e^{-2πi ξ_n z_m}` splits into an FFT kernel and a per-frequency phase
/// `e^{iπn} e^{-iπn/N}` (per axis) from the staggered node offset.
fn frequency_phases(grid: &Grid) -> Vec<Complex64> {
    let n = grid.points_per_axis();
    let axis: Vec<Complex64> = (0..n)
        .map(|j| {
            let s = grid.signed_frequency_index(j) as f64;
            Complex64::from_polar(1.0, PI * s - PI * s / n as f64)
        })
        .collect();
    match grid.dimension() {
        1 => axis,
        _ => (0..n * n).map(|j| axis[j / n] * axis[j % n]).collect(),
    }
}

/// STFT with cyclic window shifts; one FFT per x-shift.
pub fn stft(f: &FieldSample, w: &WindowSpec) -> Result<PhaseSpaceField> {
    let grid = *f.grid();
    let g = w.offset_samples(&grid)?;
    let nodes = grid.node_count();
    let phases = frequency_phases(&grid);
    let h = grid.cell_volume();
    let slots: Vec<usize> = (0..nodes).map(|j| ascending_slot(&grid, j)).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); nodes * nodes];
    values.par_chunks_mut(nodes).enumerate().for_each(|(x, row)| {
        let mut buf: Vec<Complex64> = (0..nodes)
            .map(|m| f.values()[m] * g[cyclic_offset(&grid, m, x)].conj())
            .collect();
        fft_in_place(&grid, &mut buf, false);
        for (j, v) in buf.iter().enumerate() {
            row[slots[j]] = v * phases[j] * h;
        }
    });
    Ok(PhaseSpaceField { grid, values })
}

/// `π^{-d/4} e^{-|x|²/2}`, the square root of the Gaussian density.
pub fn gaussian_half_density(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    PI.powf(-(x.len() as f64) / 4.0) * (-r2 / 2.0).exp()
}

/// `M_γ f = γ^{1/2} f`.
pub fn gaussian_multiply(f: &FieldSample) -> FieldSample {
    let grid = *f.grid();
    let d = grid.dimension();
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v * gaussian_half_density(&grid.node(i)[..d]))
        .collect();
    FieldSample::new(grid, values).expect("same length")
}

/// Gaussian STFT: `stft(M_γ f)`.
pub fn gaussian_stft(f: &FieldSample, w: &WindowSpec) -> Result<PhaseSpaceField> {
    stft(&gaussian_multiply(f), w)
}

/// Optional restriction of the outer frequency sum to `|ξ| ≤ cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrequencyBand {
    pub cutoff: Option<f64>,
}

/// Precomputed weight table for repeated norms on one grid.
#[derive(Debug, Clone)]
pub struct WeightTable {
    grid: Grid,
    /// x-major like [`PhaseSpaceField`]; `None` for the flat weight.
    values: Option<Vec<f64>>,
}

impl WeightTable {
    pub fn new(grid: &Grid, w: &WeightSpec, osc: &OscillatorSpec) -> Result<Self> {
        if w.kind == WeightKind::Flat || w.s == 0.0 {
            return Ok(WeightTable { grid: *grid, values: None });
        }
        if w.kind == WeightKind::Anharmonic && osc.dimension() != grid.dimension() {
            return Err(Error::arg("weight oscillator and grid dimensions differ"));
        }
        let d = grid.dimension();
        let nodes = grid.node_count();
        let omegas: Vec<[f64; 2]> = (0..nodes)
            .map(|k| {
                let xi = frequency_at(grid, k);
                [2.0 * PI * xi[0], 2.0 * PI * xi[1]]
            })
            .collect();
        let mut values = vec![0.0; nodes * nodes];
        values.par_chunks_mut(nodes).enumerate().for_each(|(x, row)| {
            let p = grid.node(x);
            for (k, v) in row.iter_mut().enumerate() {
                *v = weight_value(w, osc, &p[..d], &omegas[k][..d]);
            }
        });
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Numerical(format!("weight value {bad} is not finite and positive")));
        }
        Ok(WeightTable {
            grid: *grid,
            values: Some(values),
        })
    }

    fn at(&self, idx: usize) -> f64 {
        self.values.as_ref().map_or(1.0, |v| v[idx])
    }
}

/// `(Σ c |a_i|^p)^{1/p}` with max-scaling, or `max |a_i|` for `p = ∞`.
fn lp_reduce(a: &[f64], cell: f64, p: &crate::model::Exponent) -> f64 {
    let max = a.iter().fold(0.0f64, |m, v| m.max(*v));
    match p {
        crate::model::Exponent::Infinity => max,
        crate::model::Exponent::Finite(p) => {
            if max == 0.0 {
                return 0.0;
            }
            let terms: Vec<f64> = if p.fract() == 0.0 && *p <= 64.0 {
                let k = *p as i32;
                a.iter().map(|v| (v / max).powi(k)).collect()
            } else {
                a.iter().map(|v| (v / max).powf(*p)).collect()
            };
            max * (cell * pairwise_sum(&terms)).powf(1.0 / p)
        }
    }
}

/// Weighted mixed norm: inner `L^p` over x, outer `L^q` over ξ.
pub fn mixed_norm(
    field: &PhaseSpaceField,
    w: &WeightSpec,
    osc: &OscillatorSpec,
    np: &MixedNormParams,
) -> Result<f64> {
    let table = WeightTable::new(field.grid(), w, osc)?;
    mixed_norm_with(field, &table, np, FrequencyBand::default())
}

pub fn mixed_norm_with(
    field: &PhaseSpaceField,
    table: &WeightTable,
    np: &MixedNormParams,
    band: FrequencyBand,
) -> Result<f64> {
    let grid = *field.grid();
    if table.grid != grid {
        return Err(Error::GridMismatch("weight table is on a different grid".into()));
    }
    let nodes = grid.node_count();
    let d = grid.dimension();
    let h = grid.cell_volume();
    let included: Vec<usize> = (0..nodes)
        .filter(|&k| match band.cutoff {
            None => true,
            Some(c) => {
                let xi = frequency_at(&grid, k);
                xi[..d].iter().map(|v| v * v).sum::<f64>().sqrt() <= c
            }
        })
        .collect();
    let inner: Vec<f64> = included
        .par_iter()
        .map(|&k| {
            let col: Vec<f64> = (0..nodes)
                .map(|x| {
                    let idx = x * nodes + k;
                    field.values[idx].norm() * table.at(idx)
                })
                .collect();
            lp_reduce(&col, h, &np.p)
        })
        .collect();
    if let Some(bad) = inner.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite inner norm {bad}")));
    }
    let out = lp_reduce(&inner, frequency_cell(&grid), &np.q);
    if !out.is_finite() {
        return Err(Error::Numerical("non-finite mixed norm".into()));
    }
    Ok(out)
}

/// A weighted modulation space `M^{p,q}_s`, measured with one window.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpace {
    pub window: WindowSpec,
    pub weight: WeightSpec,
    pub exponents: MixedNormParams,
    /// Route through the Gaussian STFT.
    pub gaussian: bool,
}

impl ModulationSpace {
    pub fn new(weight: WeightSpec, exponents: MixedNormParams) -> Self {
        ModulationSpace {
            window: WindowSpec::Gaussian,
            weight,
            exponents,
            gaussian: false,
        }
    }

    pub fn gaussian(mut self) -> Self {
        self.gaussian = true;
        self
    }

    /// Precomputes the weight table for fields on `grid`.
    pub fn evaluator(&self, osc: &OscillatorSpec, grid: &Grid) -> Result<ModulationNorm> {
        Ok(ModulationNorm {
            space: self.clone(),
            table: WeightTable::new(grid, &self.weight, osc)?,
        })
    }
}

/// Modulation norm with the weight table cached.
#[derive(Debug, Clone)]
pub struct ModulationNorm {
    space: ModulationSpace,
    table: WeightTable,
}

impl ModulationNorm {
    pub fn space(&self) -> &ModulationSpace {
        &self.space
    }

    pub fn norm(&self, f: &FieldSample) -> Result<f64> {
        self.norm_in_band(f, FrequencyBand::default())
    }

    pub fn norm_in_band(&self, f: &FieldSample, band: FrequencyBand) -> Result<f64> {
        let field = if self.space.gaussian {
            gaussian_stft(f, &self.space.window)?
        } else {
            stft(f, &self.space.window)?
        };
        mixed_norm_with(&field, &self.table, &self.space.exponents, band)
    }
}

/// `mixed_norm(stft(f))`.
pub fn modulation_norm(
    f: &FieldSample,
    window: &WindowSpec,
    weight: &WeightSpec,
    osc: &OscillatorSpec,
    np: &MixedNormParams,
) -> Result<f64> {
    mixed_norm(&stft(f, window)?, weight, osc, np)
}

/// Warning text when more than `1e-8` of the L² mass sits within `L/12` of
/// the boundary, where cyclic window shifts start to wrap.
pub fn boundary_guard(f: &FieldSample) -> Option<String> {
    let width = f.grid().half_width() / 12.0;
    let frac = f.boundary_mass_fraction(width);
    (frac > 1e-8).then(|| format!("boundary mass fraction {frac:.3e} exceeds 1e-8; STFT wrap-around may be visible"))
}
