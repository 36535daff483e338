//! Radially symmetric solutions of `σ_k(λ) = C(n,k)·H_k` over a ball.
//!
//! For `u = u(r)`, the principal curvatures are
//! `λ_rad = u″/(1−u′²)^{3/2}` and `λ_tan = u′/(r√(1−u′²))` (multiplicity `n−1`).
//! The profile is found by Chebyshev collocation on `[0, R]` with Newton's method,
//! imposing `u′(0) = 0` and `u(R) = c`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::symfunc::binomial;

/// Chebyshev–Gauss–Lobatto points `x_j = cos(jπ/N)` and the differentiation matrix.
pub fn chebyshev(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let c = |j: usize| (if j == 0 || j == n { 2.0 } else { 1.0 }) * if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|j| *j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    (x, d)
}

/// The exact profile `u = c + (√(1+a²r²) − √(1+a²R²))/a` with `a = H_k^{1/k}`.
pub fn radial_exact(k: usize, hk: f64, radius: f64, c: f64, r: f64) -> f64 {
    let a = hk.powf(1.0 / k as f64);
    if a == 0.0 {
        return c;
    }
    // difference of square roots, written to avoid cancellation for small a
    let (p, q) = (a * a * r * r, a * a * radius * radius);
    c + (p - q) / (a * ((1.0 + p).sqrt() + (1.0 + q).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub k: usize,
    pub hk: f64,
    pub radius: f64,
    pub c: f64,
    /// Collocation radii, increasing from `0` to `R`.
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Max-norm residual of the ODE at interior collocation points.
    pub residual: f64,
    pub newton_iterations: usize,
}

impl RadialProfile {
    /// Barycentric interpolation of `u` at `r ∈ [0, R]`.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.r.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..=n {
            let diff = r - self.r[j];
            if diff == 0.0 {
                return self.u[j];
            }
            let w = (if j == 0 || j == n { 0.5 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
            num += w * self.u[j] / diff;
            den += w / diff;
        }
        num / den
    }

    pub fn center_value(&self) -> f64 {
        self.u[0]
    }

    pub fn max_slope(&self) -> f64 {
        self.du.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// `σ_k(λ_rad, λ_tan, …, λ_tan)` and its partials in `λ_rad` and `λ_tan`.
fn radial_sigma(n: usize, k: usize, rad: f64, tan: f64) -> (f64, f64, f64) {
    let a = binomial(n - 1, k - 1);
    let b = binomial(n - 1, k);
    let kf = k as f64;
    let tk1 = if k == 1 { 1.0 } else { tan.powi(k as i32 - 1) };
    let tk2 = if k <= 1 {
        0.0
    } else if k == 2 {
        1.0
    } else {
        tan.powi(k as i32 - 2)
    };
    let sigma = a * rad * tk1 + b * tan * tk1;
    let d_rad = a * tk1;
    let d_tan = a * rad * (kf - 1.0) * tk2 + b * kf * tk1;
    (sigma, d_rad, d_tan)
}

struct Collocation {
    r: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
}

impl Collocation {
    fn new(nodes: usize, radius: f64) -> Self {
        let (x, d) = chebyshev(nodes);
        // r = R(1 − x)/2 puts r = 0 first; dr/dx = −R/2
        let r: Vec<f64> = x.iter().map(|x| radius * (1.0 - x) / 2.0).collect();
        let d1 = d * (-2.0 / radius);
        let d2 = &d1 * &d1;
        Self { r, d1, d2 }
    }
}

/// Residual rows: `u′(0)`, the ODE at interior nodes, `u(R) − c`. Returns `None`
/// when some node is not spacelike.
fn residual_and_jacobian(
    col: &Collocation,
    u: &DVector<f64>,
    n: usize,
    k: usize,
    target: f64,
    c: f64,
) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let m = u.len();
    let du = &col.d1 * u;
    let ddu = &col.d2 * u;
    let mut f = DVector::zeros(m);
    let mut jac = DMatrix::zeros(m, m);
    f[0] = du[0];
    jac.row_mut(0).copy_from(&col.d1.row(0));
    for i in 1..m - 1 {
        let (p, q, r) = (du[i], ddu[i], col.r[i]);
        let w2 = 1.0 - p * p;
        if !(w2 > 0.0) {
            return None;
        }
        let w = w2.sqrt();
        let rad = q / (w2 * w);
        let tan = p / (r * w);
        let (sigma, s_rad, s_tan) = radial_sigma(n, k, rad, tan);
        f[i] = sigma - target;
        let drad_dp = 3.0 * q * p / (w2 * w2 * w);
        let drad_dq = 1.0 / (w2 * w);
        let dtan_dp = 1.0 / (r * w2 * w);
        let coef_p = s_rad * drad_dp + s_tan * dtan_dp;
        let coef_q = s_rad * drad_dq;
        for j in 0..m {
            jac[(i, j)] = coef_p * col.d1[(i, j)] + coef_q * col.d2[(i, j)];
        }
    }
    f[m - 1] = u[m - 1] - c;
    jac[(m - 1, m - 1)] = 1.0;
    Some((f, jac))
}

fn newton(
    col: &Collocation,
    n: usize,
    k: usize,
    hk: f64,
    radius: f64,
    c: f64,
) -> Result<(DVector<f64>, f64, usize), SolverError> {
    let target = binomial(n, k) * hk;
    let a = hk.powf(1.0 / k as f64);
    let beta = a.min(0.9 / radius);
    let mut u = DVector::from_iterator(
        col.r.len(),
        col.r.iter().map(|r| c - beta * (radius * radius - r * r) / 2.0),
    );
    let (mut f, mut jac) =
        residual_and_jacobian(col, &u, n, k, target, c).ok_or_else(|| SolverError::NonConvergence {
            iterations: 0,
            history: vec![],
            reason: "initial profile is not spacelike".into(),
        })?;
    let mut history = vec![f.amax()];
    for it in 1..=60 {
        let step = jac
            .clone()
            .lu()
            .solve(&(-&f))
            .ok_or_else(|| SolverError::NonConvergence {
                iterations: it,
                history: history.clone(),
                reason: "singular collocation Jacobian".into(),
            })?;
        let mut t = 1.0;
        let old = f.amax();
        loop {
            let trial = &u + &step * t;
            let slope = (&col.d1 * &trial).amax();
            if slope < 1.0 - 1e-8 {
                if let Some((ft, jt)) = residual_and_jacobian(col, &trial, n, k, target, c) {
                    if ft.amax() < old || old < 1e-12 {
                        u = trial;
                        f = ft;
                        jac = jt;
                        break;
                    }
                }
            }
            t *= 0.5;
            if t < 1e-10 {
                let interior = f.rows(1, f.len() - 2).amax();
                if interior <= 1e-10 && f[0].abs() <= 1e-10 {
                    return Ok((u, interior, it));
                }
                return Err(SolverError::NonConvergence {
                    iterations: it,
                    history,
                    reason: "profile leaves the spacelike regime".into(),
                });
            }
        }
        history.push(f.amax());
        let interior = f.rows(1, f.len() - 2).amax();
        if (t == 1.0 && step.amax() <= 1e-13 * (1.0 + u.amax())) || (interior <= 1e-13 && f[0].abs() <= 1e-13) {
            return Ok((u, interior, it));
        }
    }
    Err(SolverError::NonConvergence {
        iterations: 60,
        history,
        reason: "Newton iteration limit".into(),
    })
}

/// Solves the radial problem, doubling the number of collocation points until two
/// successive profiles agree to `1e-12` and the ODE residual is at most `1e-10`.
pub fn solve_radial(n: usize, k: usize, hk: f64, radius: f64, c: f64) -> Result<RadialProfile, SolverError> {
    if n == 0 || k == 0 || k > n {
        return Err(SolverError::InvalidConfig(format!(
            "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    if !(hk > 0.0) || !(radius > 0.0) || !hk.is_finite() || !radius.is_finite() || !c.is_finite() {
        return Err(SolverError::InvalidConfig(format!(
            "need H_k > 0 and R > 0, got H_k = {hk}, R = {radius}"
        )));
    }
    let mut previous: Option<RadialProfile> = None;
    for nodes in [24, 32, 48, 64, 96, 128] {
        let col = Collocation::new(nodes, radius);
        let (u, residual, iterations) = newton(&col, n, k, hk, radius, c)?;
        let du = &col.d1 * &u;
        let profile = RadialProfile {
            n,
            k,
            hk,
            radius,
            c,
            r: col.r.clone(),
            u: u.iter().copied().collect(),
            du: du.iter().copied().collect(),
            residual,
            newton_iterations: iterations,
        };
        if let Some(prev) = &previous {
            let change = profile
                .r
                .iter()
                .zip(&profile.u)
                .map(|(r, u)| (prev.eval(*r) - u).abs())
                .fold(0.0, f64::max);
            if change <= 1e-12 && residual <= 1e-10 {
                return Ok(profile);
            }
        }
        previous = Some(profile);
    }
    let last = previous.expect("at least one resolution");
    if last.residual <= 1e-10 {
        Ok(last)
    } else {
        Err(SolverError::NonConvergence {
            iterations: last.newton_iterations,
            history: vec![last.residual],
            reason: "collocation did not resolve the profile".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_differentiates_polynomials() {
        let (x, d) = chebyshev(8);
        let f = DVector::from_iterator(9, x.iter().map(|x| x.powi(5)));
        let df = &d * f;
        for (xi, v) in x.iter().zip(df.iter()) {
            assert!((v - 5.0 * xi.powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_profile_matches_cap() {
        let u = radial_exact(2, 1.0, 1.0, 0.0, 0.0);
        assert!((u - (1.0 - 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(radial_exact(1, 0.0, 1.0, 0.3, 0.5), 0.3);
    }

    #[test]
    fn three_two_center_value() {
        let p = solve_radial(3, 2, 1.0, 1.0, 0.0).unwrap();
        assert!((p.center_value() - (1.0 - 2f64.sqrt())).abs() < 1e-10);
        assert!(p.residual <= 1e-10);
        assert!(p.du[0].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            solve_radial(2, 3, 1.0, 1.0, 0.0),
            Err(SolverError::InvalidConfig(_))
        ));
        assert!(matches!(
            solve_radial(2, 1, 0.0, 1.0, 0.0),
            Err(SolverError::InvalidConfig(_))
        ));
    }
}
