use super::{Grid, ScalarField};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Midpoint rule `Σ value · s ρ(φ)² Δs Δφ` over `Ω`, summed in node order.
pub fn integrate(field: &ScalarField) -> f64 {
    integrate_values(field.grid(), field.values())
}

pub fn integrate_values(grid: &Grid, values: &[f64]) -> f64 {
    assert_eq!(values.len(), grid.len());
    let mut acc = CompensatedSum::default();
    for i in 0..grid.nr() {
        for j in 0..grid.nphi() {
            acc.add(values[grid.index(i, j)] * grid.cell_area(i, j));
        }
    }
    acc.value()
}
