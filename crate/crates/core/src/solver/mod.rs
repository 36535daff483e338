//! Dirichlet problems `σ_k(A[u]) = C(n,k)·H_k` in `Ω`, `u = c` on `∂Ω`.

mod dirichlet;
mod radial;
mod scan;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discretization::{
    boundary_trace, build_grid, differentiate_values, DiscretizationError, Domain, RadialBoundary, ScalarField,
};
use crate::geometry::{curvature_bundle_with, CurvatureBundle, GeometryError};

pub use dirichlet::{analytic_jacobian_k1, BlockTridiagonal};
pub use radial::{chebyshev, radial_exact, solve_radial, RadialProfile};
pub use scan::{ellipse_family, rigidity_scan, ScanRow, ScanTable, SCAN_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence after {iterations} iterations: {reason}")]
    NonConvergence {
        iterations: usize,
        history: Vec<f64>,
        reason: String,
    },
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
}

/// Step-length control for Newton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Damping {
    /// Halve the step until the iterate is admissible and the residual decreases.
    Halving { max_halvings: usize },
    /// Full steps only.
    None,
}

/// How the residual `σ_k(A[u])` is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualForm {
    /// `σ_1` from the quasilinear trace formula, `σ_2 = det D²u/(1−|Du|²)²`.
    Assembled,
    /// `σ_k` of `A = g⁻¹h` through Newton's identities.
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialGuess {
    /// Cap fitted to the inradius.
    Cap,
    /// `c − δ(1 − s²)`, `δ = 0.1·inradius`.
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n: usize,
    pub k: usize,
    pub hk: f64,
    pub domain: Domain,
    pub c: f64,
    pub nr: usize,
    pub nphi: usize,
    /// Max-norm residual at which Newton stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: Damping,
    /// Iterates need `|Du| ≤ 1 − spacelike_eps`.
    pub spacelike_eps: f64,
    /// Reject steps that leave `Γ_k`.
    pub cone_guard: bool,
    pub residual_form: ResidualForm,
}

impl SolverConfig {
    pub fn new(domain: Domain, k: usize, hk: f64, c: f64) -> Self {
        Self {
            n: 2,
            k,
            hk,
            domain,
            c,
            nr: 64,
            nphi: 128,
            tolerance: 1e-10,
            max_iterations: 50,
            damping: Damping::Halving { max_halvings: 30 },
            spacelike_eps: 1e-8,
            cone_guard: true,
            residual_form: ResidualForm::Assembled,
        }
    }

    pub fn with_grid(mut self, nr: usize, nphi: usize) -> Self {
        self.nr = nr;
        self.nphi = nphi;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if self.n != 2 {
            return bad(format!("the grid solver is planar, got n = {}", self.n));
        }
        if !(1..=2).contains(&self.k) {
            return bad(format!("k must be 1 or 2, got {}", self.k));
        }
        if !(self.hk > 0.0) || !self.hk.is_finite() {
            return bad(format!("H_k must be positive, got {}", self.hk));
        }
        if !self.c.is_finite() {
            return bad(format!("boundary height must be finite, got {}", self.c));
        }
        if !(self.tolerance > 0.0) || !(self.spacelike_eps > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }
}

/// Statistics of `θ` on `∂Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// `(max − min)/|mean|`.
    pub spread: f64,
}

impl AngleStats {
    pub fn from_values(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            mean,
            min,
            max,
            spread: (max - min) / mean.abs(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub solution: ScalarField,
    pub c: f64,
    pub k: usize,
    pub residual: f64,
    pub iterations: usize,
    /// Max-norm residual before the first step and after every accepted step.
    pub history: Vec<f64>,
    pub angle: AngleStats,
    pub cone_margin: f64,
    pub initial_guess: InitialGuess,
}

/// `θ = −1/√(1−|Du|²)` extrapolated to `s = 1` along every ray, for a field with
/// boundary value `c`.
pub fn boundary_theta(field: &ScalarField, c: f64) -> Vec<f64> {
    let grid = field.grid();
    let trace = vec![c; grid.nphi()];
    let d = differentiate_values(grid, field.values(), RadialBoundary::Dirichlet(&trace));
    let theta: Vec<f64> = d
        .gradient
        .iter()
        .map(|p| -1.0 / (1.0 - p.norm_squared()).sqrt())
        .collect();
    boundary_trace(grid, &theta)
}

pub fn boundary_angle_stats(result: &SolveResult) -> AngleStats {
    AngleStats::from_values(&boundary_theta(&result.solution, result.c))
}

/// Curvature bundle of a solution, with the boundary data `u = c` in the radial stencils.
pub fn solution_bundle(result: &SolveResult) -> Result<CurvatureBundle, GeometryError> {
    let trace = vec![result.c; result.solution.grid().nphi()];
    curvature_bundle_with(&result.solution, result.k, RadialBoundary::Dirichlet(&trace))
}

/// Whether every step taken from `r_m ≤ 1e-3` satisfies `r_{m+1} ≤ C·r_m²`,
/// steps that land at or below `floor` excepted.
pub fn quadratic_tail(history: &[f64], constant: f64, floor: f64) -> bool {
    history
        .windows(2)
        .filter(|w| w[0] <= 1e-3)
        .all(|w| w[1] <= floor || w[1] <= constant * w[0] * w[0])
}

pub fn solve_dirichlet(config: &SolverConfig) -> Result<SolveResult, SolverError> {
    config.validate()?;
    let grid = Arc::new(build_grid(&config.domain, config.nr, config.nphi)?);
    let out = dirichlet::newton(&grid, config)?;
    let solution = ScalarField::new(grid.clone(), out.u)?;
    let angle = AngleStats::from_values(&boundary_theta(&solution, config.c));
    Ok(SolveResult {
        solution,
        c: config.c,
        k: config.k,
        residual: *out.history.last().expect("history starts with the initial residual"),
        iterations: out.iterations,
        history: out.history,
        angle,
        cone_margin: out.cone_margin,
        initial_guess: out.guess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::StarDomain2D;

    fn disk() -> Domain {
        Domain::Star(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap())
    }

    #[test]
    fn block_thomas_matches_dense_solve() {
        let (nb, m) = (5, 4);
        let mut a = BlockTridiagonal::zeros(nb, m);
        let mut dense = nalgebra::DMatrix::zeros(nb * m, nb * m);
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..nb {
            for jb in i.saturating_sub(1)..=(i + 1).min(nb - 1) {
                for r in 0..m {
                    for c in 0..m {
                        let v = next() + if i == jb && r == c { 4.0 } else { 0.0 };
                        a.block_mut(i, jb)[(r, c)] = v;
                        dense[(i * m + r, jb * m + c)] = v;
                    }
                }
            }
        }
        let rhs: Vec<f64> = (0..nb * m).map(|v| (v as f64).sin()).collect();
        let x = a.solve(&rhs).unwrap();
        let y = dense.lu().solve(&nalgebra::DVector::from_vec(rhs.clone())).unwrap();
        for (p, q) in x.iter().zip(y.iter()) {
            assert!((p - q).abs() < 1e-12);
        }
        let back = a.mul(&x);
        for (p, q) in back.iter().zip(&rhs) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn colored_jacobian_matches_analytic_k1() {
        let grid = build_grid(&disk(), 6, 12).unwrap();
        let u: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let x = grid.node(grid.ij(idx).0, grid.ij(idx).1);
                0.3 * (x[0] * x[0] + x[1] * x[1] - 1.0) * (1.0 + 0.2 * x[0] + 0.1 * x[0] * x[1])
            })
            .collect();
        let problem = dirichlet::Problem::new(&grid, &vec![0.0; grid.nphi()], 1, 2.0, ResidualForm::Assembled);
        let fd = problem.jacobian(&dirichlet::State::from_values(&grid, &u));
        let exact = analytic_jacobian_k1(&grid, &u, 0.0);
        let m = grid.nphi();
        let scale = exact.amax();
        for row in 0..grid.len() {
            for col in 0..grid.len() {
                let (ri, ci) = (row / m, col / m);
                let v = if ri.abs_diff(ci) <= 1 {
                    let b = match ci as isize - ri as isize {
                        -1 => &fd.lower[ri],
                        0 => &fd.diag[ri],
                        _ => &fd.upper[ri],
                    };
                    b[(row % m, col % m)]
                } else {
                    0.0
                };
                assert!((v - exact[(row, col)]).abs() <= 1e-7 * scale, "({row}, {col})");
            }
        }
    }

    #[test]
    fn generic_and_assembled_residuals_agree() {
        let grid = build_grid(&disk(), 8, 16).unwrap();
        let u = dirichlet::cap_guess(&grid, 2, 1.0, 0.0);
        for k in [1, 2] {
            let make = |form| dirichlet::Problem::new(&grid, &vec![0.0; grid.nphi()], k, 0.0, form);
            let state = dirichlet::State::from_values(&grid, &u);
            let a = make(ResidualForm::Assembled).evaluate(&state).f;
            let b = make(ResidualForm::Generic).evaluate(&state).f;
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_tail_detection() {
        assert!(quadratic_tail(&[1.0, 1e-2, 1e-4, 1e-8, 1e-13], 10.0, 1e-12));
        assert!(!quadratic_tail(&[1e-3, 1e-4, 1e-5, 1e-6], 10.0, 1e-12));
        assert!(quadratic_tail(&[1e-4, 1e-12], 1.0, 1e-10));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = SolverConfig::new(disk(), 3, 1.0, 0.0);
        assert!(matches!(solve_dirichlet(&cfg), Err(SolverError::InvalidConfig(_))));
        cfg.k = 1;
        cfg.hk = -1.0;
        assert!(matches!(solve_dirichlet(&cfg), Err(SolverError::InvalidConfig(_))));
    }

    #[test]
    fn small_disk_solve() {
        let cfg = SolverConfig::new(disk(), 1, 1.0, 0.0).with_grid(16, 32);
        let r = solve_dirichlet(&cfg).unwrap();
        assert!(r.residual <= 1e-10);
        assert!((r.solution.center_value() - (1.0 - 2f64.sqrt())).abs() < 2e-2);
        assert!((r.angle.mean + 2f64.sqrt()).abs() < 2e-2);
    }
}
