//! Hyperboloid caps `u = c + θ₀ + √(1 + |x−a|²)` over `B_R(a)`, `R = √(θ₀² − 1)`.
//!
//! These are the umbilic graphs with `h_i^j = δ_ij`, so `H_k = 1` for every `k`,
//! the boundary angle is `θ₀` and `P ≡ −c − θ₀`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::discretization::{DiscretizationError, Grid, ScalarField, StarDomain2D};
use crate::symfunc::binomial;

#[derive(Debug, thiserror::Error)]
pub enum HyperboloidError {
    #[error("intersection angle θ₀ = {0} must satisfy θ₀ ≤ −1")]
    InvalidAngle(f64),
    #[error("radius {0} must be finite and nonnegative")]
    InvalidRadius(f64),
    #[error("center has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point at distance {distance} from the center lies outside the cap of radius {radius}")]
    OutsideCap { distance: f64, radius: f64 },
    #[error("grid domain is not the disk B_R(a) of the cap: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidCap {
    n: usize,
    c: f64,
    theta0: f64,
    a: Vec<f64>,
    radius: f64,
}

pub fn cap_from_angle(n: usize, c: f64, theta0: f64, a: &[f64]) -> Result<HyperboloidCap, HyperboloidError> {
    HyperboloidCap::from_angle(n, c, theta0, a)
}

impl HyperboloidCap {
    pub fn from_angle(n: usize, c: f64, theta0: f64, a: &[f64]) -> Result<Self, HyperboloidError> {
        if !(theta0 <= -1.0) || !theta0.is_finite() {
            return Err(HyperboloidError::InvalidAngle(theta0));
        }
        if a.len() != n {
            return Err(HyperboloidError::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        Ok(Self {
            n,
            c,
            theta0,
            a: a.to_vec(),
            radius: (theta0 * theta0 - 1.0).sqrt(),
        })
    }

    /// `θ₀ = −√(1 + R²)`.
    pub fn from_radius(n: usize, c: f64, radius: f64, a: &[f64]) -> Result<Self, HyperboloidError> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(HyperboloidError::InvalidRadius(radius));
        }
        let mut cap = Self::from_angle(n, c, -(1.0 + radius * radius).sqrt(), a)?;
        cap.radius = radius;
        Ok(cap)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn center(&self) -> &[f64] {
        &self.a
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_degenerate(&self) -> bool {
        self.radius == 0.0
    }

    /// The constant value of `P`.
    pub fn p_value(&self) -> f64 {
        -self.c - self.theta0
    }

    fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.a)
            .map(|(xi, ai)| (xi - ai).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Closed-form height; defined on all of `R^n`.
    pub fn u(&self, x: &[f64]) -> f64 {
        let d = self.distance(x);
        self.c + self.theta0 + (1.0 + d * d).sqrt()
    }

    /// Exact geometry at points of the closed ball.
    pub fn analytic_bundle(&self, points: &[Vec<f64>]) -> Result<Vec<AnalyticPoint>, HyperboloidError> {
        points.iter().map(|x| self.analytic_point(x)).collect()
    }

    pub fn analytic_point(&self, x: &[f64]) -> Result<AnalyticPoint, HyperboloidError> {
        if x.len() != self.n {
            return Err(HyperboloidError::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let d = self.distance(x);
        if d > self.radius * (1.0 + 1e-12) + 1e-15 {
            return Err(HyperboloidError::OutsideCap {
                distance: d,
                radius: self.radius,
            });
        }
        let n = self.n;
        let root = (1.0 + d * d).sqrt();
        let du = DVector::from_iterator(n, x.iter().zip(&self.a).map(|(xi, ai)| (xi - ai) / root));
        // 1 − |Du|² = 1/(1+d²)
        let w = 1.0 / root;
        let mut normal = DVector::zeros(n + 1);
        for i in 0..n {
            normal[i] = du[i] / w;
        }
        normal[n] = 1.0 / w;
        Ok(AnalyticPoint {
            x: x.to_vec(),
            u: self.c + self.theta0 + root,
            g: DMatrix::identity(n, n) - &du * du.transpose(),
            du,
            normal,
            shape: DMatrix::identity(n, n),
            lambda: vec![1.0; n],
            sigmas: (0..=n).map(|k| binomial(n, k)).collect(),
            hk: vec![1.0; n + 1],
            theta: -root,
            p: -self.c - self.theta0,
        })
    }

    /// The disk `B_R(a)` as a planar star domain.
    pub fn disk_domain(&self) -> Result<StarDomain2D, HyperboloidError> {
        if self.n != 2 {
            return Err(HyperboloidError::DimensionMismatch {
                expected: 2,
                found: self.n,
            });
        }
        Ok(StarDomain2D::disk([self.a[0], self.a[1]], self.radius)?)
    }

    /// Nodewise closed-form `u` on a polar grid over `B_R(a)`.
    pub fn sample_to_grid(&self, grid: &Arc<Grid>) -> Result<ScalarField, HyperboloidError> {
        if self.n != 2 {
            return Err(HyperboloidError::DimensionMismatch {
                expected: 2,
                found: self.n,
            });
        }
        let star = grid.star();
        let center = star.center();
        let mismatch = (center[0] - self.a[0]).abs().max((center[1] - self.a[1]).abs());
        let radius = star.disk_radius();
        match radius {
            Some(r) if (r - self.radius).abs() <= 1e-12 && mismatch <= 1e-12 => {}
            _ => {
                return Err(HyperboloidError::DomainMismatch(format!(
                    "grid center ({}, {}) radius {:?}, cap center ({}, {}) radius {}",
                    center[0], center[1], radius, self.a[0], self.a[1], self.radius
                )))
            }
        }
        Ok(ScalarField::from_fn(grid.clone(), |x| self.u(&[x[0], x[1]]))?)
    }
}

/// Exact geometry of a cap at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPoint {
    pub x: Vec<f64>,
    pub u: f64,
    pub du: DVector<f64>,
    pub g: DMatrix<f64>,
    pub normal: DVector<f64>,
    pub shape: DMatrix<f64>,
    pub lambda: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// `H_0, …, H_n`.
    pub hk: Vec<f64>,
    pub theta: f64,
    pub p: f64,
}

pub fn sample_to_grid(cap: &HyperboloidCap, grid: &Arc<Grid>) -> Result<ScalarField, HyperboloidError> {
    cap.sample_to_grid(grid)
}
