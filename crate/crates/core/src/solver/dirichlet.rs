//! Damped Newton for `σ_k(A[u]) = C(2,k)·H_k` on a polar grid with `u = c` at `s = 1`.
//!
//! Every ring is unknown. The discrete residual at ring `i` depends only on rings
//! `i−1, i, i+1`, so the Jacobian is block tridiagonal with dense `nphi × nphi`
//! blocks. It is assembled column by column with central differences, perturbing
//! all nodes `(i, j)` with equal `i mod 3` and equal `j` at once.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use super::{Damping, InitialGuess, ResidualForm, SolverConfig, SolverError};
use crate::discretization::{differentiate_values, Derivatives, Grid, RadialBoundary};
use crate::symfunc::{self, binomial, SquareMatrix};

pub(crate) struct Evaluation {
    pub f: Vec<f64>,
    pub max_grad: f64,
    /// `min_{nodes} min_{i ≤ k} σ_i`.
    pub cone_margin: f64,
}

impl Evaluation {
    pub fn max_abs(&self) -> f64 {
        self.f.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Nodal values kept as ring means plus deviations from them. Angular derivatives
/// on the innermost rings amplify rounding by about `nphi²/s²`; with the split, that
/// rounding scales with the angular variation of `u` instead of with `|u|`.
#[derive(Debug, Clone)]
pub(crate) struct State {
    means: Vec<f64>,
    deviations: Vec<f64>,
}

impl State {
    pub fn from_values(grid: &Grid, u: &[f64]) -> Self {
        let nphi = grid.nphi();
        let means: Vec<f64> = u
            .chunks(nphi)
            .map(|ring| ring.iter().sum::<f64>() / nphi as f64)
            .collect();
        let deviations = u.iter().enumerate().map(|(idx, v)| v - means[idx / nphi]).collect();
        Self { means, deviations }
    }

    pub fn values(&self) -> Vec<f64> {
        let nphi = self.deviations.len() / self.means.len();
        self.deviations
            .iter()
            .enumerate()
            .map(|(idx, d)| self.means[idx / nphi] + d)
            .collect()
    }

    fn step(&self, t: f64, step: &[f64]) -> Self {
        let nphi = self.deviations.len() / self.means.len();
        let mut out = self.clone();
        for (i, ring) in step.chunks(nphi).enumerate() {
            let mean = ring.iter().sum::<f64>() / nphi as f64;
            out.means[i] += t * mean;
            for (j, v) in ring.iter().enumerate() {
                out.deviations[i * nphi + j] += t * (v - mean);
            }
        }
        out
    }
}

pub(crate) struct Problem<'a> {
    pub grid: &'a Grid,
    pub k: usize,
    pub target: f64,
    pub form: ResidualForm,
    trace: Vec<f64>,
    zero: Vec<f64>,
}

/// `(σ_1, σ_k)` at one node from `Du` and `D²u`; `None` if `|Du| ≥ 1`.
fn node_sigmas(form: ResidualForm, k: usize, p: &Vector2<f64>, h: &Matrix2<f64>) -> Option<(f64, f64)> {
    let w2 = 1.0 - p.norm_squared();
    if !(w2 > 0.0) {
        return None;
    }
    let w = w2.sqrt();
    match form {
        ResidualForm::Assembled => {
            let s1 = (h.trace() + p.dot(&(h * p)) / w2) / w;
            let sk = if k == 1 { s1 } else { h.determinant() / (w2 * w2) };
            Some((s1, sk))
        }
        ResidualForm::Generic => {
            let ginv = Matrix2::identity() + p * p.transpose() / w2;
            let e = symfunc::sigmas(&SquareMatrix::from(ginv * h / w));
            Some((e[1], e[k]))
        }
    }
}

impl<'a> Problem<'a> {
    pub fn new(grid: &'a Grid, trace: &[f64], k: usize, target: f64, form: ResidualForm) -> Self {
        Self {
            grid,
            k,
            target,
            form,
            trace: trace.to_vec(),
            zero: vec![0.0; grid.nphi()],
        }
    }

    fn derivatives(&self, state: &State) -> Derivatives {
        let nphi = self.grid.nphi();
        let centre = state.means[0];
        let rings: Vec<f64> = (0..self.grid.len())
            .map(|idx| state.means[idx / nphi] - centre)
            .collect();
        let trace: Vec<f64> = self.trace.iter().map(|v| v - centre).collect();
        let mut d = differentiate_values(self.grid, &rings, RadialBoundary::Dirichlet(&trace));
        let dev = differentiate_values(self.grid, &state.deviations, RadialBoundary::Dirichlet(&self.zero));
        for (g, g0) in d.gradient.iter_mut().zip(&dev.gradient) {
            *g += g0;
        }
        for (h, h0) in d.hessian.iter_mut().zip(&dev.hessian) {
            *h += h0;
        }
        d
    }

    pub fn evaluate(&self, state: &State) -> Evaluation {
        let d = self.derivatives(state);
        let mut f = Vec::with_capacity(self.grid.len());
        let mut max_grad = 0.0f64;
        let mut cone_margin = f64::INFINITY;
        for (p, h) in d.gradient.iter().zip(&d.hessian) {
            max_grad = max_grad.max(p.norm());
            match node_sigmas(self.form, self.k, p, h) {
                Some((s1, sk)) => {
                    cone_margin = cone_margin.min(if self.k == 1 { s1 } else { s1.min(sk) });
                    f.push(sk - self.target);
                }
                None => {
                    cone_margin = f64::NEG_INFINITY;
                    f.push(f64::NAN);
                }
            }
        }
        if max_grad.is_nan() {
            max_grad = f64::INFINITY;
        }
        Evaluation {
            f,
            max_grad,
            cone_margin,
        }
    }

    /// Directional central differences of the nodal map `(Du, D²u) ↦ σ_k`. The
    /// derivative operators are linear, so the perturbed derivatives are
    /// `Du ± t·De`, `D²u ± t·D²e` with `e` the coloured unit direction; `t` is
    /// chosen per node relative to the size of the perturbation.
    pub fn jacobian(&self, state: &State) -> BlockTridiagonal {
        let (nr, nphi) = (self.grid.nr(), self.grid.nphi());
        let zero = &self.zero;
        let base = self.derivatives(state);
        let mut jac = BlockTridiagonal::zeros(nr, nphi);
        let mut e = vec![0.0; self.grid.len()];
        for phase in 0..3 {
            for j in 0..nphi {
                for i in (phase..nr).step_by(3) {
                    e[i * nphi + j] = 1.0;
                }
                let de = differentiate_values(self.grid, &e, RadialBoundary::Dirichlet(zero));
                for i in (phase..nr).step_by(3) {
                    e[i * nphi + j] = 0.0;
                    for row_ring in i.saturating_sub(1)..=(i + 1).min(nr - 1) {
                        let block = jac.block_mut(row_ring, i);
                        for jr in 0..nphi {
                            let r = row_ring * nphi + jr;
                            let (dp, dh) = (de.gradient[r], de.hessian[r]);
                            let size = dp.norm() + dh.norm();
                            if size == 0.0 {
                                continue;
                            }
                            let (p, h) = (base.gradient[r], base.hessian[r]);
                            let t = 1e-6 * (1.0 + h.norm()) / size;
                            let plus = node_sigmas(self.form, self.k, &(p + dp * t), &(h + dh * t));
                            let minus = node_sigmas(self.form, self.k, &(p - dp * t), &(h - dh * t));
                            if let (Some(a), Some(b)) = (plus, minus) {
                                block[(jr, j)] = (a.1 - b.1) / (2.0 * t);
                            }
                        }
                    }
                }
            }
        }
        jac
    }
}

/// Block tridiagonal matrix; row block `i` couples to column blocks `i−1, i, i+1`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    pub lower: Vec<DMatrix<f64>>,
    pub diag: Vec<DMatrix<f64>>,
    pub upper: Vec<DMatrix<f64>>,
}

impl BlockTridiagonal {
    pub fn zeros(blocks: usize, size: usize) -> Self {
        let z = || DMatrix::zeros(size, size);
        Self {
            lower: (0..blocks).map(|_| z()).collect(),
            diag: (0..blocks).map(|_| z()).collect(),
            upper: (0..blocks).map(|_| z()).collect(),
        }
    }

    pub fn blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn block_size(&self) -> usize {
        self.diag[0].nrows()
    }

    /// Block `(row, col)` with `|row − col| ≤ 1`.
    pub fn block_mut(&mut self, row: usize, col: usize) -> &mut DMatrix<f64> {
        if col + 1 == row {
            &mut self.lower[row]
        } else if col == row {
            &mut self.diag[row]
        } else if col == row + 1 {
            &mut self.upper[row]
        } else {
            panic!("block ({row}, {col}) is outside the tridiagonal band")
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let (nb, m) = (self.blocks(), self.block_size());
        let part = |i: usize| DVector::from_column_slice(&x[i * m..(i + 1) * m]);
        let mut out = Vec::with_capacity(x.len());
        for i in 0..nb {
            let mut y = &self.diag[i] * part(i);
            if i > 0 {
                y += &self.lower[i] * part(i - 1);
            }
            if i + 1 < nb {
                y += &self.upper[i] * part(i + 1);
            }
            out.extend(y.iter());
        }
        out
    }

    /// Block Thomas elimination with partial pivoting inside each diagonal block.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let (nb, m) = (self.blocks(), self.block_size());
        let mut c_prime: Vec<DMatrix<f64>> = Vec::with_capacity(nb);
        let mut d_prime: Vec<DVector<f64>> = Vec::with_capacity(nb);
        for i in 0..nb {
            let mut diag = self.diag[i].clone();
            let mut b = DVector::from_column_slice(&rhs[i * m..(i + 1) * m]);
            if i > 0 {
                diag -= &self.lower[i] * &c_prime[i - 1];
                b -= &self.lower[i] * &d_prime[i - 1];
            }
            let lu = diag.lu();
            if i + 1 < nb {
                c_prime.push(lu.solve(&self.upper[i])?);
            }
            d_prime.push(lu.solve(&b)?);
        }
        let mut x = vec![DVector::zeros(m); nb];
        x[nb - 1] = d_prime[nb - 1].clone();
        for i in (0..nb - 1).rev() {
            x[i] = &d_prime[i] - &c_prime[i] * &x[i + 1];
        }
        let out: Vec<f64> = x.iter().flat_map(|v| v.iter().copied()).collect();
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

/// Cap of radius `ρ_in` for `H_k`, written in the mapped radius `s`:
/// `u₀ = c + (√(1+a²ρ_in²s²) − √(1+a²ρ_in²))/a`.
pub(crate) fn cap_guess(grid: &Grid, k: usize, hk: f64, c: f64) -> Vec<f64> {
    let rho = grid.star().inradius();
    (0..grid.len())
        .map(|idx| {
            let s = grid.s(grid.ij(idx).0);
            super::radial::radial_exact(k, hk, rho, c, rho * s)
        })
        .collect()
}

/// `u₀ = c − δ(1 − s²)` with `δ = 0.1·ρ_in`.
pub(crate) fn fallback_guess(grid: &Grid, c: f64) -> Vec<f64> {
    let delta = 0.1 * grid.star().inradius();
    (0..grid.len())
        .map(|idx| {
            let s = grid.s(grid.ij(idx).0);
            c - delta * (1.0 - s * s)
        })
        .collect()
}

pub(crate) struct NewtonOutcome {
    pub u: Vec<f64>,
    pub history: Vec<f64>,
    pub iterations: usize,
    pub cone_margin: f64,
    pub guess: InitialGuess,
}

fn admissible(e: &Evaluation, config: &SolverConfig) -> bool {
    e.max_grad <= 1.0 - config.spacelike_eps
        && (!config.cone_guard || e.cone_margin > 0.0)
        && e.f.iter().all(|v| v.is_finite())
}

pub(crate) fn newton(grid: &Grid, config: &SolverConfig) -> Result<NewtonOutcome, SolverError> {
    let trace = vec![config.c; grid.nphi()];
    let target = target(config.k, config.hk);
    let problem = Problem::new(grid, &trace, config.k, target, config.residual_form);
    let mut guess = InitialGuess::Cap;
    let mut state = State::from_values(grid, &cap_guess(grid, config.k, config.hk, config.c));
    let mut eval = problem.evaluate(&state);
    if !admissible(&eval, config) {
        guess = InitialGuess::Fallback;
        state = State::from_values(grid, &fallback_guess(grid, config.c));
        eval = problem.evaluate(&state);
        if !admissible(&eval, config) {
            return Err(SolverError::NonConvergence {
                iterations: 0,
                history: vec![],
                reason: "no admissible initial guess".into(),
            });
        }
    }
    let max_halvings = match config.damping {
        Damping::Halving { max_halvings } => max_halvings,
        Damping::None => 0,
    };
    let mut history = vec![eval.max_abs()];
    let mut iterations = 0;
    while eval.max_abs() > config.tolerance {
        if iterations == config.max_iterations {
            return Err(SolverError::NonConvergence {
                iterations,
                history,
                reason: "iteration limit".into(),
            });
        }
        iterations += 1;
        let rhs: Vec<f64> = eval.f.iter().map(|v| -v).collect();
        let step = problem
            .jacobian(&state)
            .solve(&rhs)
            .ok_or_else(|| SolverError::NonConvergence {
                iterations,
                history: history.clone(),
                reason: "singular Jacobian".into(),
            })?;
        let old = eval.max_abs();
        let mut t = 1.0;
        let mut halvings = 0;
        loop {
            let trial = state.step(t, &step);
            let te = problem.evaluate(&trial);
            if admissible(&te, config) && te.max_abs() < old {
                state = trial;
                eval = te;
                break;
            }
            if halvings == max_halvings {
                return Err(SolverError::NonConvergence {
                    iterations,
                    history,
                    reason: format!("line search stagnated at residual {old:e}"),
                });
            }
            halvings += 1;
            t *= 0.5;
        }
        history.push(eval.max_abs());
    }
    Ok(NewtonOutcome {
        u: state.values(),
        history,
        iterations,
        cone_margin: eval.cone_margin,
        guess,
    })
}

/// Dense Jacobian of the `k = 1` residual from its quasilinear form
/// `σ_1 = (Δu + u_iu_ju_ij/(1−|Du|²))/√(1−|Du|²)`, built from the discrete
/// derivative operators applied to unit vectors. Intended for small grids.
pub fn analytic_jacobian_k1(grid: &Grid, u: &[f64], c: f64) -> DMatrix<f64> {
    let n = grid.len();
    let trace = vec![c; grid.nphi()];
    let zero = vec![0.0; grid.nphi()];
    let d = differentiate_values(grid, u, RadialBoundary::Dirichlet(&trace));
    let mut jac = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e[col] = 1.0;
        let de = differentiate_values(grid, &e, RadialBoundary::Dirichlet(&zero));
        e[col] = 0.0;
        for row in 0..n {
            let (p, h) = (d.gradient[row], d.hessian[row]);
            let w2 = 1.0 - p.norm_squared();
            let w = w2.sqrt();
            let php = p.dot(&(h * p));
            let a = h.trace() + php / w2;
            let ds_dh = (Matrix2::identity() + p * p.transpose() / w2) / w;
            let ds_dp = (h * p * 2.0 / w2 + p * (2.0 * php / (w2 * w2))) / w + p * (a / (w2 * w));
            jac[(row, col)] = ds_dh.component_mul(&de.hessian[row]).sum() + ds_dp.dot(&de.gradient[row]);
        }
    }
    jac
}

pub(crate) fn target(k: usize, hk: f64) -> f64 {
    binomial(2, k) * hk
}
