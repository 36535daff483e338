//! Boundary-fitted polar grid over a star-shaped domain.
//!
//! Node `(i, j)` sits at `x = center + s_i ρ(φ_j) (cos φ_j, sin φ_j)` with the
//! cell-centred radial coordinate `s_i = (i + ½)/nr` and `φ_j = 2πj/nphi`.
//! No node lies on the polar origin; radial stencils at the innermost ring
//! reach across the centre to ray `j + nphi/2`.

use std::f64::consts::PI;

use nalgebra::Vector2;

use super::spectral::PeriodicDerivative;
use super::stencil::fornberg_weights;
use super::{DiscretizationError, Domain, StarDomain2D};

#[derive(Debug, Clone)]
pub struct Grid {
    domain: Domain,
    star: StarDomain2D,
    nr: usize,
    nphi: usize,
    s: Vec<f64>,
    phi: Vec<f64>,
    /// `[ρ, ρ', ρ'']` per ray.
    rho: Vec<[f64; 3]>,
    /// `(cos φ_j, sin φ_j)`.
    dir: Vec<[f64; 2]>,
    /// Radial first/second derivative weights at the innermost ring, per ray, on the
    /// points `[reflected ring 0, ring 0, ring 1]`.
    center_weights: Vec<[[f64; 3]; 2]>,
    angular: PeriodicDerivative,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.nr == other.nr && self.nphi == other.nphi && self.domain == other.domain
    }
}

/// Builds the polar grid for a star domain or a two-dimensional ball.
pub fn build_grid(domain: &Domain, nr: usize, nphi: usize) -> Result<Grid, DiscretizationError> {
    Grid::new(domain.clone(), nr, nphi)
}

impl Grid {
    pub fn new(domain: Domain, nr: usize, nphi: usize) -> Result<Self, DiscretizationError> {
        if nr < 4 || nphi < 8 || !nphi.is_multiple_of(2) {
            return Err(DiscretizationError::GridInvalid(format!(
                "need nr >= 4 and even nphi >= 8, got nr = {nr}, nphi = {nphi}"
            )));
        }
        let star = domain.as_star()?;
        let s: Vec<f64> = (0..nr).map(|i| (i as f64 + 0.5) / nr as f64).collect();
        let phi: Vec<f64> = (0..nphi).map(|j| 2.0 * PI * j as f64 / nphi as f64).collect();
        let rho: Vec<[f64; 3]> = phi.iter().map(|&p| star.rho_derivatives(p)).collect();
        for (j, r) in rho.iter().enumerate() {
            if !(r[0] > 0.0) {
                return Err(DiscretizationError::DomainInvalid(format!(
                    "rho sample {} at phi = {} is not positive",
                    r[0], phi[j]
                )));
            }
        }
        let dir = phi.iter().map(|p| [p.cos(), p.sin()]).collect();
        let half = nphi / 2;
        let center_weights = (0..nphi)
            .map(|j| {
                let opposite = rho[(j + half) % nphi][0];
                let reflected = -s[0] * opposite / rho[j][0];
                let w = fornberg_weights(s[0], &[reflected, s[0], s[1]], 2);
                [[w[1][0], w[1][1], w[1][2]], [w[2][0], w[2][1], w[2][2]]]
            })
            .collect();
        Ok(Self {
            domain,
            star,
            nr,
            nphi,
            s,
            phi,
            rho,
            dir,
            center_weights,
            angular: PeriodicDerivative::new(nphi),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn star(&self) -> &StarDomain2D {
        &self.star
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nphi(&self) -> usize {
        self.nphi
    }

    pub fn len(&self) -> usize {
        self.nr * self.nphi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ds(&self) -> f64 {
        1.0 / self.nr as f64
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.nphi as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s[i]
    }

    pub fn phi(&self, j: usize) -> f64 {
        self.phi[j]
    }

    /// `[ρ, ρ', ρ'']` on ray `j`.
    pub fn rho(&self, j: usize) -> [f64; 3] {
        self.rho[j]
    }

    pub fn direction(&self, j: usize) -> [f64; 2] {
        self.dir[j]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nphi + j
    }

    /// `(i, j)` of a flat node index.
    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx / self.nphi, idx % self.nphi)
    }

    /// Ray opposite to `j` through the centre.
    #[inline]
    pub fn opposite(&self, j: usize) -> usize {
        (j + self.nphi / 2) % self.nphi
    }

    pub fn node(&self, i: usize, j: usize) -> Vector2<f64> {
        let c = self.star.center();
        let r = self.s[i] * self.rho[j][0];
        Vector2::new(c[0] + r * self.dir[j][0], c[1] + r * self.dir[j][1])
    }

    pub fn nodes(&self) -> Vec<Vector2<f64>> {
        (0..self.len())
            .map(|idx| {
                let (i, j) = self.ij(idx);
                self.node(i, j)
            })
            .collect()
    }

    /// Point on the boundary `s = 1` of ray `j`.
    pub fn boundary_point(&self, j: usize) -> Vector2<f64> {
        let c = self.star.center();
        let r = self.rho[j][0];
        Vector2::new(c[0] + r * self.dir[j][0], c[1] + r * self.dir[j][1])
    }

    /// Determinant of `∂x/∂(s, φ)`, equal to `s ρ(φ)²`.
    pub fn jacobian_det(&self, i: usize, j: usize) -> f64 {
        self.s[i] * self.rho[j][0] * self.rho[j][0]
    }

    /// Quadrature weight `s ρ² Δs Δφ` of node `(i, j)`.
    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        self.jacobian_det(i, j) * self.ds() * self.dphi()
    }

    pub(crate) fn center_weights(&self, j: usize) -> &[[f64; 3]; 2] {
        &self.center_weights[j]
    }

    pub(crate) fn angular(&self) -> &PeriodicDerivative {
        &self.angular
    }

    /// Compact description used in reports and file headers.
    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            nr: self.nr,
            nphi: self.nphi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GridDescriptor {
    pub nr: usize,
    pub nphi: usize,
}

impl GridDescriptor {
    /// Radial spacing `1/nr` in the mapped coordinate.
    pub fn h(&self) -> f64 {
        1.0 / self.nr as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::BallDomain;

    fn unit_disk() -> Domain {
        Domain::Star(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap())
    }

    #[test]
    fn node_map_on_unit_disk() {
        let g = build_grid(&unit_disk(), 4, 8).unwrap();
        assert_eq!(g.len(), 32);
        let x = g.node(0, 0);
        assert!((x[0] - 0.125).abs() < 1e-15 && x[1].abs() < 1e-15);
        for i in 0..4 {
            assert!((g.jacobian_det(i, 3) - g.s(i)).abs() < 1e-15);
            assert!(g.s(i) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_grid(&unit_disk(), 3, 8).is_err());
        assert!(build_grid(&unit_disk(), 4, 6).is_err());
        assert!(build_grid(&unit_disk(), 4, 9).is_err());
    }

    #[test]
    fn ball_and_disk_grids_share_geometry() {
        let ball = Domain::Ball(BallDomain::new(vec![0.5, -0.25], 2.0).unwrap());
        let g = build_grid(&ball, 8, 16).unwrap();
        let x = g.node(7, 4);
        let expected = [0.5, -0.25 + 2.0 * 7.5 / 8.0];
        assert!((x[0] - expected[0]).abs() < 1e-14 && (x[1] - expected[1]).abs() < 1e-14);
    }
}
