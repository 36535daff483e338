//! Fourier differentiation of periodic samples on a uniform angular ring.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct PeriodicDerivative {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicDerivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicDerivative").field("n", &self.n).finish()
    }
}

impl PeriodicDerivative {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n.is_multiple_of(2), "ring size must be even");
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// First and (optionally) second derivative in φ of samples at `φ_j = 2πj/n`.
    ///
    /// The ring mean is removed before transforming; derivatives of a constant are
    /// exactly zero and the roundoff floor scales with the variation, not the level.
    pub fn apply(&self, values: &[f64], d1: &mut [f64], d2: Option<&mut [f64]>) {
        let n = self.n;
        assert_eq!(values.len(), n);
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut spec: Vec<Complex64> = values.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
        self.forward.process(&mut spec);
        let scale = 1.0 / n as f64;
        let half = n / 2;
        let wavenumber = |m: usize| -> f64 {
            if m < half {
                m as f64
            } else {
                m as f64 - n as f64
            }
        };

        let mut first: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if m == half {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, wavenumber(m) * scale)
                }
            })
            .collect();
        self.inverse.process(&mut first);
        for (o, c) in d1.iter_mut().zip(&first) {
            *o = c.re;
        }

        if let Some(d2) = d2 {
            let mut second: Vec<Complex64> = spec
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let k = if m == half { half as f64 } else { wavenumber(m) };
                    c * (-k * k * scale)
                })
                .collect();
            self.inverse.process(&mut second);
            for (o, c) in d2.iter_mut().zip(&second) {
                *o = c.re;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trig_polynomials_are_differentiated_exactly() {
        let n = 16;
        let op = PeriodicDerivative::new(n);
        let phi: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let f: Vec<f64> = phi
            .iter()
            .map(|p| 3.0 + (2.0 * p).cos() - 0.5 * (5.0 * p).sin())
            .collect();
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        op.apply(&f, &mut d1, Some(&mut d2));
        for (j, p) in phi.iter().enumerate() {
            let e1 = -2.0 * (2.0 * p).sin() - 2.5 * (5.0 * p).cos();
            let e2 = -4.0 * (2.0 * p).cos() + 12.5 * (5.0 * p).sin();
            assert!((d1[j] - e1).abs() < 1e-12);
            assert!((d2[j] - e2).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_have_zero_derivative() {
        let op = PeriodicDerivative::new(8);
        let mut d1 = vec![1.0; 8];
        let mut d2 = vec![1.0; 8];
        op.apply(&[0.7; 8], &mut d1, Some(&mut d2));
        assert!(d1.iter().chain(&d2).all(|v| *v == 0.0));
    }
}
