//! Planar domains: star-shaped regions with a Fourier boundary radius, and balls.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::DiscretizationError;

/// Star-shaped planar domain `{center + r (cos φ, sin φ) : 0 <= r < ρ(φ)}`.
///
/// The boundary radius is a truncated Fourier series
/// `ρ(φ) = a0 + Σ_m (cos_m cos mφ + sin_m sin mφ)`, `m = 1..=M`, so it is
/// 2π-periodic by construction. Positivity is checked by dense sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarDomain2D {
    center: [f64; 2],
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl StarDomain2D {
    pub fn new(center: [f64; 2], a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self, DiscretizationError> {
        if cos.len() != sin.len() {
            return Err(DiscretizationError::DomainInvalid(format!(
                "cos/sin coefficient counts differ ({} vs {})",
                cos.len(),
                sin.len()
            )));
        }
        let all = center
            .iter()
            .chain(std::iter::once(&a0))
            .chain(cos.iter())
            .chain(sin.iter());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(DiscretizationError::DomainInvalid("non-finite domain parameter".into()));
        }
        let domain = Self { center, a0, cos, sin };
        let samples = (64 * (domain.modes() + 1)).max(1024);
        for q in 0..samples {
            let phi = 2.0 * PI * q as f64 / samples as f64;
            let r = domain.rho(phi);
            if !(r > 0.0) {
                return Err(DiscretizationError::DomainInvalid(format!(
                    "boundary radius rho({phi:.6}) = {r:e} is not positive"
                )));
            }
        }
        Ok(domain)
    }

    /// Disk of the given radius.
    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self, DiscretizationError> {
        Self::new(center, radius, Vec::new(), Vec::new())
    }

    /// Least-squares Fourier fit of an arbitrary positive radius function with `modes` modes.
    ///
    /// Coefficients come from the trapezoidal DFT on `max(16 modes, 256)` samples, which
    /// is the exact L2 projection for band-limited input.
    pub fn fit(center: [f64; 2], modes: usize, radius: impl Fn(f64) -> f64) -> Result<Self, DiscretizationError> {
        let samples = (16 * modes).max(256);
        let values: Vec<f64> = (0..samples)
            .map(|q| radius(2.0 * PI * q as f64 / samples as f64))
            .collect();
        let norm = 1.0 / samples as f64;
        let a0 = values.iter().sum::<f64>() * norm;
        let mut cos = Vec::with_capacity(modes);
        let mut sin = Vec::with_capacity(modes);
        for m in 1..=modes {
            let (mut c, mut s) = (0.0, 0.0);
            for (q, v) in values.iter().enumerate() {
                let phi = 2.0 * PI * q as f64 / samples as f64;
                c += v * (m as f64 * phi).cos();
                s += v * (m as f64 * phi).sin();
            }
            cos.push(2.0 * c * norm);
            sin.push(2.0 * s * norm);
        }
        Self::new(center, a0, cos, sin)
    }

    /// Ellipse with semi-axis `a` along x₁ and `b` along x₂.
    pub fn ellipse(center: [f64; 2], a: f64, b: f64, modes: usize) -> Result<Self, DiscretizationError> {
        if !(a > 0.0 && b > 0.0) {
            return Err(DiscretizationError::DomainInvalid(format!(
                "ellipse semi-axes must be positive, got ({a}, {b})"
            )));
        }
        Self::fit(center, modes, |phi| ellipse_radius(a, b, phi))
    }

    /// `ρ(φ) = r0 (1 + amplitude cos(mode φ))`.
    pub fn perturbed_disk(center: [f64; 2], r0: f64, amplitude: f64, mode: usize) -> Result<Self, DiscretizationError> {
        if mode == 0 {
            return Err(DiscretizationError::DomainInvalid(
                "perturbation mode must be at least 1".into(),
            ));
        }
        let mut cos = vec![0.0; mode];
        cos[mode - 1] = r0 * amplitude;
        Self::new(center, r0, cos, vec![0.0; mode])
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    pub fn modes(&self) -> usize {
        self.cos.len()
    }

    pub fn rho(&self, phi: f64) -> f64 {
        self.rho_derivatives(phi)[0]
    }

    /// `[ρ, ρ', ρ'']` at `phi`.
    pub fn rho_derivatives(&self, phi: f64) -> [f64; 3] {
        let mut out = [self.a0, 0.0, 0.0];
        for (idx, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let m = (idx + 1) as f64;
            let (sn, cs) = (m * phi).sin_cos();
            out[0] += c * cs + s * sn;
            out[1] += m * (s * cs - c * sn);
            out[2] -= m * m * (c * cs + s * sn);
        }
        out
    }

    /// Exact area `½∫ρ² dφ`.
    pub fn area(&self) -> f64 {
        let tail: f64 = self.cos.iter().zip(&self.sin).map(|(c, s)| c * c + s * s).sum();
        PI * self.a0 * self.a0 + 0.5 * PI * tail
    }

    /// `(min ρ, max ρ)` from dense sampling.
    pub fn rho_range(&self) -> (f64, f64) {
        let samples = (64 * (self.modes() + 1)).max(1024);
        (0..samples)
            .map(|q| self.rho(2.0 * PI * q as f64 / samples as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    /// Largest radius of a disk about `center` inside the domain.
    pub fn inradius(&self) -> f64 {
        self.rho_range().0
    }

    /// `max ρ / min ρ`; equals the aspect ratio for centred ellipses and 1 for disks.
    pub fn asymmetry(&self) -> f64 {
        let (lo, hi) = self.rho_range();
        hi / lo
    }

    /// Radius if the boundary is a circle about `center`.
    pub fn disk_radius(&self) -> Option<f64> {
        let round = self
            .cos
            .iter()
            .chain(&self.sin)
            .all(|c| c.abs() <= 1e-14 * self.a0.abs());
        round.then_some(self.a0)
    }
}

/// Polar radius of the centred ellipse `x²/a² + y²/b² = 1`.
pub fn ellipse_radius(a: f64, b: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    a * b / ((b * c).powi(2) + (a * s).powi(2)).sqrt()
}

/// Ball `B_R(a)` in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDomain {
    n: usize,
    center: Vec<f64>,
    radius: f64,
}

impl BallDomain {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self, DiscretizationError> {
        let n = center.len();
        if n < 2 {
            return Err(DiscretizationError::DomainInvalid(format!(
                "ball dimension must be at least 2, got {n}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DiscretizationError::DomainInvalid(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(DiscretizationError::DomainInvalid("non-finite ball center".into()));
        }
        Ok(Self { n, center, radius })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Star(StarDomain2D),
    Ball(BallDomain),
}

impl Domain {
    /// Star-shaped description used by planar grids; balls must be two-dimensional.
    pub fn as_star(&self) -> Result<StarDomain2D, DiscretizationError> {
        match self {
            Domain::Star(star) => Ok(star.clone()),
            Domain::Ball(ball) if ball.n == 2 => StarDomain2D::disk([ball.center[0], ball.center[1]], ball.radius),
            Domain::Ball(ball) => Err(DiscretizationError::DomainInvalid(format!(
                "planar grids need a 2-dimensional ball, got n = {}",
                ball.n
            ))),
        }
    }
}

impl From<StarDomain2D> for Domain {
    fn from(d: StarDomain2D) -> Self {
        Domain::Star(d)
    }
}

impl From<BallDomain> for Domain {
    fn from(d: BallDomain) -> Self {
        Domain::Ball(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_fit_matches_closed_form() {
        let d = StarDomain2D::ellipse([0.0, 0.0], 1.0, 0.8, 32).unwrap();
        let worst = (0..2000)
            .map(|q| {
                let phi = 2.0 * PI * q as f64 / 2000.0 + 0.1234;
                (d.rho(phi) - ellipse_radius(1.0, 0.8, phi)).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "fit error {worst:e}");
        assert!((d.area() - 0.8 * PI).abs() < 1e-10);
        assert!((d.asymmetry() - 1.25).abs() < 1e-6);
    }

    #[test]
    fn non_positive_radius_is_rejected() {
        let err = StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, 1.2, 3).unwrap_err();
        assert!(matches!(err, DiscretizationError::DomainInvalid(_)));
        assert!(StarDomain2D::disk([0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn rho_derivatives_match_finite_differences() {
        let d = StarDomain2D::new([0.0, 0.0], 1.0, vec![0.1, 0.0, 0.05], vec![0.0, -0.07, 0.02]).unwrap();
        let phi = 0.77;
        let h = 1e-5;
        let [_, d1, d2] = d.rho_derivatives(phi);
        let fd1 = (d.rho(phi + h) - d.rho(phi - h)) / (2.0 * h);
        let fd2 = (d.rho(phi + h) - 2.0 * d.rho(phi) + d.rho(phi - h)) / (h * h);
        assert!((d1 - fd1).abs() < 1e-8);
        assert!((d2 - fd2).abs() < 1e-4);
    }

    #[test]
    fn ball_requires_positive_radius_and_dimension() {
        assert!(BallDomain::new(vec![0.0, 0.0], 0.0).is_err());
        assert!(BallDomain::new(vec![0.0], 1.0).is_err());
        let b = BallDomain::new(vec![0.0, 0.0, 0.0], 2.0).unwrap();
        assert_eq!(b.dimension(), 3);
        assert!(Domain::Ball(b).as_star().is_err());
    }
}
