use num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

/// Complex samples of a function at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    grid: Grid,
    values: Vec<Complex64>,
}

impl FieldSample {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::arg(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(FieldSample { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        FieldSample {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.node_count()],
        }
    }

    /// Samples `f(x)` at every node; `x` has `grid.dimension()` entries.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: Grid, f: F) -> Self {
        let d = grid.dimension();
        let values = (0..grid.node_count())
            .map(|i| {
                let p = grid.node(i);
                f(&p[..d])
            })
            .collect();
        FieldSample { grid, values }
    }

    pub fn from_real_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn ensure_same_grid(&self, other: &FieldSample) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// Discrete inner product `h^d Σ u_i conj(v_i)`.
    pub fn inner(&self, other: &FieldSample) -> Result<Complex64> {
        self.ensure_same_grid(other)?;
        let re: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a * b.conj()).re).collect();
        let im: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a * b.conj()).im).collect();
        let h = self.grid.cell_volume();
        Ok(Complex64::new(h * pairwise_sum(&re), h * pairwise_sum(&im)))
    }

    /// Discrete L² norm.
    pub fn norm_l2(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        (self.grid.cell_volume() * pairwise_sum(&sq)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> FieldSample {
        self.map(|v| v * c)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> FieldSample {
        FieldSample {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &FieldSample, f: F) -> Result<FieldSample> {
        self.ensure_same_grid(other)?;
        Ok(FieldSample {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn add(&self, other: &FieldSample) -> Result<FieldSample> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FieldSample) -> Result<FieldSample> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &FieldSample) -> Result<FieldSample> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Fraction of the L² mass in the band `|x_j| > L - width` of any axis.
    pub fn boundary_mass_fraction(&self, width: f64) -> f64 {
        let total: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        let total = pairwise_sum(&total);
        if total == 0.0 {
            return 0.0;
        }
        let d = self.grid.dimension();
        let edge = self.grid.half_width() - width;
        let outer: Vec<f64> = (0..self.values.len())
            .map(|i| {
                let p = self.grid.node(i);
                if p[..d].iter().any(|c| c.abs() > edge) {
                    self.values[i].norm_sqr()
                } else {
                    0.0
                }
            })
            .collect();
        pairwise_sum(&outer) / total
    }

    /// Max of `|u(x) - u(-x)|`.
    pub fn parity_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|i| (self.values[i] - self.values[self.grid.mirror_index(i)]).norm())
            .fold(0.0, f64::max)
    }
}
