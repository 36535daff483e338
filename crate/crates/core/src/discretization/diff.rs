//! Cartesian first and second derivatives of grid fields.
//!
//! Radial derivatives use three-point stencils in `s` (across the centre at the
//! innermost ring, through a ghost value at the outermost ring). Angular
//! derivatives are Fourier-spectral along each ring. Both are pushed to Cartesian
//! components through the inverse mapping Jacobian, including the curvature terms
//! of the map, so polynomials of degree ≤ 2 are reproduced exactly.

use nalgebra::{Matrix2, Vector2};

use super::stencil::fornberg_weights;
use super::{Grid, ScalarField};

/// How radial stencils close at the outermost ring.
#[derive(Debug, Clone, Copy)]
pub enum RadialBoundary<'a> {
    /// Ghost value at `s = 1 + Δs/2` by quartic extrapolation of the five outermost rings.
    Extrapolate,
    /// Known values at `s = 1`, one per ray.
    Dirichlet(&'a [f64]),
}

#[derive(Debug, Clone)]
pub struct Derivatives {
    pub gradient: Vec<Vector2<f64>>,
    /// Symmetric Cartesian Hessian per node.
    pub hessian: Vec<Matrix2<f64>>,
}

pub fn differentiate(field: &ScalarField) -> Derivatives {
    differentiate_values(field.grid(), field.values(), RadialBoundary::Extrapolate)
}

pub fn differentiate_with(field: &ScalarField, boundary: RadialBoundary<'_>) -> Derivatives {
    differentiate_values(field.grid(), field.values(), boundary)
}

/// Cartesian gradient only.
pub fn gradient(field: &ScalarField) -> Vec<Vector2<f64>> {
    differentiate(field).gradient
}

/// Mapped-coordinate derivatives `(u_s, u_ss)` along every ray.
fn radial_derivatives(grid: &Grid, values: &[f64], boundary: RadialBoundary<'_>) -> (Vec<f64>, Vec<f64>) {
    let (nr, nphi) = (grid.nr(), grid.nphi());
    let ds = grid.ds();
    let mut us = vec![0.0; values.len()];
    let mut uss = vec![0.0; values.len()];
    let ghost_weights = {
        let degree = 4.min(nr - 1);
        let xs: Vec<f64> = (0..=degree).map(|m| -(m as f64)).collect();
        fornberg_weights(1.0, &xs, 0).swap_remove(0)
    };
    let dirichlet_weights = {
        let s = |i: usize| grid.s(i);
        let w = fornberg_weights(s(nr - 1), &[s(nr - 2), s(nr - 1), 1.0], 2);
        [w[1].clone(), w[2].clone()]
    };

    for j in 0..nphi {
        let at = |i: usize| values[i * nphi + j];

        // innermost ring: reflected node on the opposite ray
        let w = grid.center_weights(j);
        let f = [values[grid.opposite(j)], at(0), at(1)];
        us[j] = w[0][0] * f[0] + w[0][1] * f[1] + w[0][2] * f[2];
        uss[j] = w[1][0] * f[0] + w[1][1] * f[1] + w[1][2] * f[2];

        for i in 1..nr - 1 {
            let (a, b, c) = (at(i - 1), at(i), at(i + 1));
            us[i * nphi + j] = (c - a) / (2.0 * ds);
            uss[i * nphi + j] = (a - 2.0 * b + c) / (ds * ds);
        }

        let last = nr - 1;
        match boundary {
            RadialBoundary::Extrapolate => {
                let ghost: f64 = ghost_weights.iter().enumerate().map(|(m, w)| w * at(last - m)).sum();
                let (a, b) = (at(last - 1), at(last));
                us[last * nphi + j] = (ghost - a) / (2.0 * ds);
                uss[last * nphi + j] = (a - 2.0 * b + ghost) / (ds * ds);
            }
            RadialBoundary::Dirichlet(trace) => {
                let f = [at(last - 1), at(last), trace[j]];
                let [w1, w2] = &dirichlet_weights;
                us[last * nphi + j] = w1[0] * f[0] + w1[1] * f[1] + w1[2] * f[2];
                uss[last * nphi + j] = w2[0] * f[0] + w2[1] * f[1] + w2[2] * f[2];
            }
        }
    }
    (us, uss)
}

pub fn differentiate_values(grid: &Grid, values: &[f64], boundary: RadialBoundary<'_>) -> Derivatives {
    let (nr, nphi) = (grid.nr(), grid.nphi());
    assert_eq!(values.len(), nr * nphi, "field does not match grid");
    if let RadialBoundary::Dirichlet(trace) = boundary {
        assert_eq!(trace.len(), nphi, "boundary trace needs one value per ray");
    }
    let (us, uss) = radial_derivatives(grid, values, boundary);

    let mut uphi = vec![0.0; values.len()];
    let mut uphiphi = vec![0.0; values.len()];
    let mut usphi = vec![0.0; values.len()];
    let angular = grid.angular();
    for i in 0..nr {
        let r = i * nphi..(i + 1) * nphi;
        let (d1, d2) = (&mut uphi[r.clone()], &mut uphiphi[r.clone()]);
        angular.apply(&values[r.clone()], d1, Some(d2));
        angular.apply(&us[r.clone()], &mut usphi[r], None);
    }

    let mut gradient = Vec::with_capacity(values.len());
    let mut hessian = Vec::with_capacity(values.len());
    for i in 0..nr {
        let s = grid.s(i);
        for j in 0..nphi {
            let idx = i * nphi + j;
            let (g, h) = to_cartesian(grid, s, j, [us[idx], uphi[idx]], [uss[idx], usphi[idx], uphiphi[idx]]);
            gradient.push(g);
            hessian.push(h);
        }
    }
    Derivatives { gradient, hessian }
}

/// Chain rule from `(s, φ)` derivatives to Cartesian ones at ray `j`, radius `s`.
fn to_cartesian(grid: &Grid, s: f64, j: usize, d1: [f64; 2], d2: [f64; 3]) -> (Vector2<f64>, Matrix2<f64>) {
    let [rho, rho1, rho2] = grid.rho(j);
    let [c, sn] = grid.direction(j);
    let e = Vector2::new(c, sn);
    let ep = Vector2::new(-sn, c);
    let x_s = e * rho;
    let x_phi = (e * rho1 + ep * rho) * s;
    let x_sphi = e * rho1 + ep * rho;
    let x_phiphi = (e * rho2 + ep * (2.0 * rho1) - e * rho) * s;

    // columns of J are x_s and x_φ
    let jac = Matrix2::new(x_s[0], x_phi[0], x_s[1], x_phi[1]);
    let det = jac[(0, 0)] * jac[(1, 1)] - jac[(0, 1)] * jac[(1, 0)];
    let jinv = Matrix2::new(jac[(1, 1)], -jac[(0, 1)], -jac[(1, 0)], jac[(0, 0)]) / det;

    let grad = jinv.transpose() * Vector2::new(d1[0], d1[1]);
    let mixed = d2[1] - grad.dot(&x_sphi);
    let hxi = Matrix2::new(d2[0], mixed, mixed, d2[2] - grad.dot(&x_phiphi));
    let h = jinv.transpose() * hxi * jinv;
    let off = 0.5 * (h[(0, 1)] + h[(1, 0)]);
    (grad, Matrix2::new(h[(0, 0)], off, off, h[(1, 1)]))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::discretization::{build_grid, Domain, StarDomain2D};

    fn grid(domain: StarDomain2D, nr: usize, nphi: usize) -> Arc<Grid> {
        Arc::new(build_grid(&Domain::Star(domain), nr, nphi).unwrap())
    }

    #[test]
    fn linear_functions_are_exact() {
        let g = grid(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap(), 16, 32);
        let f = ScalarField::from_fn(g, |x| 3.0 + 2.0 * x[0]).unwrap();
        let d = differentiate(&f);
        for (gr, h) in d.gradient.iter().zip(&d.hessian) {
            assert!((gr[0] - 2.0).abs() < 1e-11 && gr[1].abs() < 1e-11);
            assert!(h.abs().max() < 1e-9);
        }
    }

    #[test]
    fn quadratics_are_exact_on_disk_and_ellipse() {
        for (domain, tol) in [
            (StarDomain2D::disk([0.2, -0.1], 1.0).unwrap(), 1e-10),
            (StarDomain2D::ellipse([0.0, 0.0], 1.0, 0.8, 32).unwrap(), 1e-8),
        ] {
            let g = grid(domain, 24, 48);
            let f = ScalarField::from_fn(g, |x| (x[0] - 0.3) * (x[1] + 0.1) + 0.5 * x[0] * x[0]).unwrap();
            let d = differentiate(&f);
            for (idx, h) in d.hessian.iter().enumerate() {
                let err = (h - Matrix2::new(1.0, 1.0, 1.0, 0.0)).abs().max();
                assert!(err < tol, "node {idx}: hessian error {err:e}");
            }
        }
    }

    #[test]
    fn dirichlet_closure_is_exact_on_quadratics() {
        let g = grid(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap(), 12, 24);
        let u = |x: Vector2<f64>| x[0] * x[1] - 0.25 * x[1] * x[1];
        let f = ScalarField::from_fn(g.clone(), u).unwrap();
        let trace: Vec<f64> = (0..g.nphi()).map(|j| u(g.boundary_point(j))).collect();
        let d = differentiate_with(&f, RadialBoundary::Dirichlet(&trace));
        for h in &d.hessian {
            assert!((h - Matrix2::new(0.0, 1.0, 1.0, -0.5)).abs().max() < 1e-9);
        }
    }

    #[test]
    fn smooth_gradient_converges_at_second_order() {
        let err = |nr: usize| {
            let g = grid(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap(), nr, 2 * nr);
            let f = ScalarField::from_fn(g.clone(), |x| x[0].sin() * x[1].cos()).unwrap();
            let d = differentiate(&f);
            g.nodes()
                .iter()
                .zip(&d.gradient)
                .map(|(x, gr)| {
                    let exact = Vector2::new(x[0].cos() * x[1].cos(), -x[0].sin() * x[1].sin());
                    (gr - exact).norm()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }
}
