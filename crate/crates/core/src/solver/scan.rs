use serde::{Deserialize, Serialize};

use super::{solve_dirichlet, SolverConfig, SolverError};
use crate::discretization::{Domain, StarDomain2D};

pub const SCAN_HEADER: &str = "asymmetry,spread,theta_mean,u_min,iterations,converged";

/// One solve of a rigidity scan. Failed solves keep `NaN` statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    /// `max ρ / min ρ` of the domain.
    pub asymmetry: f64,
    pub spread: f64,
    pub theta_mean: f64,
    pub u_min: f64,
    pub iterations: usize,
    pub converged: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    /// Spread never decreases as asymmetry grows (converged rows only).
    pub monotone: bool,
}

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCAN_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:e},{},{},{},{}\n",
                r.asymmetry, r.spread, r.theta_mean, r.u_min, r.iterations, r.converged
            ));
        }
        out
    }

    /// Human-readable trend line for reports.
    pub fn trend(&self) -> &'static str {
        if self.monotone {
            "spread is nondecreasing in asymmetry"
        } else {
            "spread is not monotone in asymmetry"
        }
    }
}

/// Ellipses with semi-axes `1` and `1/aspect`, centred at the origin.
pub fn ellipse_family(aspects: &[f64], modes: usize) -> Result<Vec<StarDomain2D>, SolverError> {
    aspects
        .iter()
        .map(|a| Ok(StarDomain2D::ellipse([0.0, 0.0], 1.0, 1.0 / a, modes)?))
        .collect()
}

/// One Dirichlet solve per domain with `base`'s grid, `k`, `H_k`, `c` and tolerances.
pub fn rigidity_scan(domains: &[StarDomain2D], base: &SolverConfig) -> ScanTable {
    let rows: Vec<ScanRow> = domains
        .iter()
        .map(|d| {
            let mut cfg = base.clone();
            cfg.domain = Domain::Star(d.clone());
            let asymmetry = d.asymmetry();
            match solve_dirichlet(&cfg) {
                Ok(r) => ScanRow {
                    asymmetry,
                    spread: r.angle.spread,
                    theta_mean: r.angle.mean,
                    u_min: r.solution.min(),
                    iterations: r.iterations,
                    converged: true,
                    message: String::new(),
                },
                Err(e) => {
                    let iterations = match &e {
                        SolverError::NonConvergence { iterations, .. } => *iterations,
                        _ => 0,
                    };
                    ScanRow {
                        asymmetry,
                        spread: f64::NAN,
                        theta_mean: f64::NAN,
                        u_min: f64::NAN,
                        iterations,
                        converged: false,
                        message: e.to_string(),
                    }
                }
            }
        })
        .collect();
    let mut ok: Vec<&ScanRow> = rows.iter().filter(|r| r.converged).collect();
    ok.sort_by(|a, b| a.asymmetry.total_cmp(&b.asymmetry));
    let monotone = ok.windows(2).all(|w| w[1].spread >= w[0].spread);
    ScanTable { rows, monotone }
}
