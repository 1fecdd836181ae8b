use std::cell::RefCell;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{FieldSample, Grid};
use crate::error::{Error, Result};
use crate::model::{evaluate_potential, OscillatorSpec};

/// Dense real symmetric matrix of the discretized operator.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub(crate) oscillator: Option<OscillatorSpec>,
    pub(crate) grid: Grid,
    pub(crate) matrix: DMatrix<f64>,
}

impl OperatorMatrix {
    /// Wraps an arbitrary symmetric matrix acting on grid nodes.
    pub fn from_matrix(grid: Grid, matrix: DMatrix<f64>) -> Result<Self> {
        let n = grid.node_count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::arg(format!(
                "matrix is {}x{}, grid has {n} nodes",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(OperatorMatrix {
            oscillator: None,
            grid,
            matrix,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn oscillator(&self) -> Option<&OscillatorSpec> {
        self.oscillator.as_ref()
    }

    /// `max |A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }
}

/// `|ω|^{2l}` at every DFT index (FFT ordering per axis, row-major).
pub fn laplacian_symbol(grid: &Grid, l: u32) -> Vec<f64> {
    let n = grid.points_per_axis();
    match grid.dimension() {
        1 => (0..n).map(|k| grid.angular_frequency(k).powi(2 * l as i32)).collect(),
        _ => {
            let mut out = Vec::with_capacity(n * n);
            for a in 0..n {
                let wa = grid.angular_frequency(a);
                for b in 0..n {
                    let wb = grid.angular_frequency(b);
                    out.push((wa * wa + wb * wb).powi(l as i32));
                }
            }
            out
        }
    }
}

/// In-place d-dimensional DFT (unnormalized in both directions).
pub(crate) fn fft_in_place(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    thread_local! {
        // the planner caches plans, so repeated transforms skip twiddle setup
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }
    let n = grid.points_per_axis();
    let fft = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    });
    match grid.dimension() {
        1 => fft.process(data),
        _ => {
            for row in data.chunks_mut(n) {
                fft.process(row);
            }
            let mut column = vec![Complex64::new(0.0, 0.0); n];
            for b in 0..n {
                for a in 0..n {
                    column[a] = data[a * n + b];
                }
                fft.process(&mut column);
                for a in 0..n {
                    data[a * n + b] = column[a];
                }
            }
        }
    }
}

/// Dense matrix of `F* diag(|ω|^{2l}) F + diag(potential)`.
///
/// Lower-level than [`assemble_operator`]: the potential values are given
/// directly, so `V = 0` or constant shifts can be assembled for checks.
pub fn assemble_from_potential(grid: &Grid, l: u32, potential: &[f64]) -> Result<DMatrix<f64>> {
    let nodes = grid.node_count();
    if potential.len() != nodes {
        return Err(Error::arg("potential length does not match the grid"));
    }
    // first column of the (block-)circulant Laplacian power
    let mut kernel: Vec<Complex64> = laplacian_symbol(grid, l).into_iter().map(|s| Complex64::new(s, 0.0)).collect();
    fft_in_place(grid, &mut kernel, true);
    let scale = 1.0 / nodes as f64;
    let kernel: Vec<f64> = kernel.iter().map(|c| c.re * scale).collect();

    let n = grid.points_per_axis();
    let mut a = DMatrix::<f64>::zeros(nodes, nodes);
    match grid.dimension() {
        1 => {
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = kernel[(i + n - j) % n];
                }
            }
        }
        _ => {
            for i in 0..nodes {
                let (ia, ib) = (i / n, i % n);
                for j in 0..nodes {
                    let (ja, jb) = (j / n, j % n);
                    a[(i, j)] = kernel[((ia + n - ja) % n) * n + (ib + n - jb) % n];
                }
            }
        }
    }
    // symmetrize away the last bits of FFT round-off
    let at = a.transpose();
    a = (a + at) * 0.5;
    for (i, v) in potential.iter().enumerate() {
        a[(i, i)] += v;
    }
    Ok(a)
}

fn potential_on_grid(osc: &OscillatorSpec, grid: &Grid) -> Vec<f64> {
    let d = grid.dimension();
    (0..grid.node_count())
        .map(|i| {
            let p = grid.node(i);
            evaluate_potential(osc.potential(), &p[..d])
        })
        .collect()
}

/// Dense matrix of `(-Δ)^l + V` on the periodic staggered grid.
pub fn assemble_operator(osc: &OscillatorSpec, grid: &Grid) -> Result<OperatorMatrix> {
    if osc.dimension() != grid.dimension() {
        return Err(Error::arg(format!(
            "oscillator dimension {} does not match grid dimension {}",
            osc.dimension(),
            grid.dimension()
        )));
    }
    let matrix = assemble_from_potential(grid, osc.l(), &potential_on_grid(osc, grid))?;
    Ok(OperatorMatrix {
        oscillator: Some(osc.clone()),
        grid: *grid,
        matrix,
    })
}

/// Matrix-free application of `(-Δ)^l + V` through the FFT.
pub fn apply_operator(osc: &OscillatorSpec, f: &FieldSample) -> Result<FieldSample> {
    let grid = *f.grid();
    if osc.dimension() != grid.dimension() {
        return Err(Error::arg("oscillator and field dimensions differ"));
    }
    let symbol = laplacian_symbol(&grid, osc.l());
    let mut data = f.values().to_vec();
    fft_in_place(&grid, &mut data, false);
    for (v, s) in data.iter_mut().zip(&symbol) {
        *v *= *s;
    }
    fft_in_place(&grid, &mut data, true);
    let scale = 1.0 / grid.node_count() as f64;
    let pot = potential_on_grid(osc, &grid);
    let out = data
        .iter()
        .zip(f.values())
        .zip(&pot)
        .map(|((lap, u), v)| lap * scale + u * v)
        .collect();
    FieldSample::new(grid, out)
}
