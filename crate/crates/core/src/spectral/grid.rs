use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::is_power_of_two;

/// Staggered periodic grid on `[-L, L)^d`.
///
/// Nodes sit at `x_i = -L + (i + 1/2) h` with `h = 2L/N`, so the origin is
/// never a node. Multi-dimensional indices are row-major (axis 0 slowest).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct Grid {
    dimension: usize,
    points_per_axis: usize,
    half_width: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawGrid {
    dimension: usize,
    points_per_axis: usize,
    half_width: f64,
}

impl TryFrom<RawGrid> for Grid {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        Grid::new(r.dimension, r.points_per_axis, r.half_width)
    }
}

impl From<Grid> for RawGrid {
    fn from(g: Grid) -> Self {
        RawGrid {
            dimension: g.dimension,
            points_per_axis: g.points_per_axis,
            half_width: g.half_width,
        }
    }
}

impl Grid {
    pub fn new(dimension: usize, points_per_axis: usize, half_width: f64) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::arg(format!("grid dimension must be 1 or 2, got {dimension}")));
        }
        if !is_power_of_two(points_per_axis) {
            return Err(Error::arg(format!(
                "points per axis must be a power of two, got {points_per_axis}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::arg(format!("half width must be positive, got {half_width}")));
        }
        Ok(Grid {
            dimension,
            points_per_axis,
            half_width,
        })
    }

    /// 512 points on `[-12, 12)` in 1D, 64 per axis in 2D.
    pub fn default_for(dimension: usize) -> Result<Self> {
        let n = if dimension == 2 { 64 } else { 512 };
        Grid::new(dimension, n, 12.0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// `N^d`.
    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    /// Quadrature weight `h^d` of one node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn axis_coordinate(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    pub fn axis_coordinates(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|j| self.axis_coordinate(j)).collect()
    }

    /// Per-axis indices of flat node `i`.
    pub fn axis_indices(&self, i: usize) -> [usize; 2] {
        let n = self.points_per_axis;
        match self.dimension {
            1 => [i, 0],
            _ => [i / n, i % n],
        }
    }

    /// Coordinates of node `i`; only the first `dimension` entries are used.
    pub fn node(&self, i: usize) -> [f64; 2] {
        let [a, b] = self.axis_indices(i);
        match self.dimension {
            1 => [self.axis_coordinate(a), 0.0],
            _ => [self.axis_coordinate(a), self.axis_coordinate(b)],
        }
    }

    pub fn node_norm(&self, i: usize) -> f64 {
        let p = self.node(i);
        p[..self.dimension].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Angular frequency `π n / L` of DFT index `k` (FFT ordering).
    pub fn angular_frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI * self.signed_frequency_index(k) as f64 / self.half_width
    }

    /// Signed integer frequency for FFT-ordered index `k`, in `[-N/2, N/2)`.
    pub fn signed_frequency_index(&self, k: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Flat index of the node mirrored through the origin.
    pub fn mirror_index(&self, i: usize) -> usize {
        let n = self.points_per_axis;
        let [a, b] = self.axis_indices(i);
        match self.dimension {
            1 => n - 1 - a,
            _ => (n - 1 - a) * n + (n - 1 - b),
        }
    }

    /// Same grid with twice as many points per axis.
    pub fn refined(&self) -> Self {
        Grid {
            points_per_axis: 2 * self.points_per_axis,
            ..*self
        }
    }
}
