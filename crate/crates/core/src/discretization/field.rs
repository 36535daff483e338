use std::sync::Arc;

use nalgebra::Vector2;

use super::{DiscretizationError, Grid};

/// Grid-sampled real function, stored row-major (`i` outer, `j` inner).
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, DiscretizationError> {
        if values.len() != grid.len() {
            return Err(DiscretizationError::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(DiscretizationError::NonFinite { index: idx });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(Vector2<f64>) -> f64) -> Result<Self, DiscretizationError> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, value: f64) -> Result<Self, DiscretizationError> {
        let n = grid.len();
        Self::new(grid, vec![value; n])
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn ring(&self, i: usize) -> &[f64] {
        let n = self.grid.nphi();
        &self.values[i * n..(i + 1) * n]
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, DiscretizationError> {
        Self::new(self.grid.clone(), values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, DiscretizationError> {
        self.with_values(self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Values extrapolated to the boundary `s = 1` along each ray (quadratic through
    /// the three outermost rings).
    pub fn boundary_trace(&self) -> Vec<f64> {
        boundary_trace(&self.grid, &self.values)
    }

    /// Value at the domain centre, from the two innermost ring means assuming an
    /// even radial profile `a + b s²`.
    pub fn center_value(&self) -> f64 {
        let mean = |i: usize| self.ring(i).iter().sum::<f64>() / self.grid.nphi() as f64;
        (9.0 * mean(0) - mean(1)) / 8.0
    }
}

/// Quadratic extrapolation of nodal values to `s = 1` along each ray.
pub fn boundary_trace(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let nr = grid.nr();
    (0..grid.nphi())
        .map(|j| {
            let v = |i: usize| values[grid.index(i, j)];
            (15.0 * v(nr - 1) - 10.0 * v(nr - 2) + 3.0 * v(nr - 3)) / 8.0
        })
        .collect()
}
