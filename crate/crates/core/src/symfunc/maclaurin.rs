use super::{binomial, cone_from_sigmas, sigmas_of_spectrum, Spectrum, SymFuncError};

/// Slack of the Newton–MacLaurin inequalities at one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MaclaurinReport {
    pub k: usize,
    /// Normalized `H_0, …, H_n`.
    pub h: Vec<f64>,
    /// `H_k² - H_{k-1} H_{k+1}`.
    pub newton_slack: f64,
    /// `H_m^{1/m} - H_{m+1}^{1/(m+1)}` for `m = 1..k`.
    pub maclaurin_slacks: Vec<f64>,
    /// Slacks below `-1e-12` (relative).
    pub violations: usize,
    /// `max λ - min λ <= 1e-12`: every inequality is an equality.
    pub umbilic: bool,
}

pub fn check_newton_maclaurin(lambda: &Spectrum, k: usize) -> Result<MaclaurinReport, SymFuncError> {
    let n = lambda.len();
    if k == 0 || k > n {
        return Err(SymFuncError::InvalidIndex { k, n });
    }
    let e = sigmas_of_spectrum(lambda.values());
    let cone = cone_from_sigmas(&e, k);
    if !cone.inside {
        return Err(SymFuncError::OutsideCone { k, margin: cone.margin });
    }
    let mut h: Vec<f64> = (0..=n).map(|m| e[m] / binomial(n, m)).collect();
    h.push(0.0); // H_{n+1}
    let tol = |scale: f64| 1e-12 * scale.max(1.0);

    let mut violations = 0;
    let newton_slack = h[k] * h[k] - h[k - 1] * h[k + 1];
    if newton_slack < -tol(h[k] * h[k] + (h[k - 1] * h[k + 1]).abs()) {
        violations += 1;
    }
    let roots: Vec<f64> = (1..=k).map(|m| h[m].powf(1.0 / m as f64)).collect();
    let maclaurin_slacks: Vec<f64> = roots.windows(2).map(|w| w[0] - w[1]).collect();
    for (w, slack) in roots.windows(2).zip(&maclaurin_slacks) {
        if *slack < -tol(w[0].abs()) {
            violations += 1;
        }
    }
    Ok(MaclaurinReport {
        k,
        h: h[..=n].to_vec(),
        newton_slack,
        maclaurin_slacks,
        violations,
        umbilic: lambda.spread() <= 1e-12,
    })
}
