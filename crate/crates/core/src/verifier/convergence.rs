use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{verify_bundle, Tolerances, VerifierError, VerifyContext};
use crate::discretization::{build_grid, Domain, Grid, GridDescriptor, ScalarField, StarDomain2D};
use crate::geometry::curvature_bundle;
use crate::hyperboloid::HyperboloidCap;

/// `amplitude · cos(wave · x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub wave: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldCase {
    /// Hyperboloid cap over the case domain, which must be its disk.
    Cap {
        c: f64,
        theta0: f64,
    },
    /// `amplitude · sin x₁ sin x₂`.
    Sines {
        amplitude: f64,
    },
    /// `offset + Σ terms`.
    Trig {
        offset: f64,
        terms: Vec<TrigTerm>,
    },
    Constant {
        c: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseDescriptor {
    pub domain: StarDomain2D,
    pub field: FieldCase,
    pub k: usize,
    pub tolerances: Tolerances,
}

impl CaseDescriptor {
    /// Cap with angle `θ₀` centred at the origin, on its own disk.
    pub fn cap(c: f64, theta0: f64, k: usize) -> Result<Self, VerifierError> {
        let cap = HyperboloidCap::from_angle(2, c, theta0, &[0.0, 0.0])?;
        Ok(Self {
            domain: cap.disk_domain()?,
            field: FieldCase::Cap { c, theta0 },
            k,
            tolerances: Tolerances::default(),
        })
    }

    pub fn hyperboloid(&self) -> Result<Option<HyperboloidCap>, VerifierError> {
        match &self.field {
            FieldCase::Cap { c, theta0 } => {
                let center = self.domain.center();
                Ok(Some(HyperboloidCap::from_angle(2, *c, *theta0, &center)?))
            }
            _ => Ok(None),
        }
    }

    pub fn sample(&self, grid: &Arc<Grid>) -> Result<ScalarField, VerifierError> {
        let field = match &self.field {
            FieldCase::Cap { .. } => {
                let cap = self.hyperboloid()?.expect("cap case");
                cap.sample_to_grid(grid)?
            }
            FieldCase::Sines { amplitude } => {
                ScalarField::from_fn(grid.clone(), |x| amplitude * x[0].sin() * x[1].sin())?
            }
            FieldCase::Trig { offset, terms } => ScalarField::from_fn(grid.clone(), |x| {
                offset
                    + terms
                        .iter()
                        .map(|t| t.amplitude * (t.wave[0] * x[0] + t.wave[1] * x[1]).cos())
                        .sum::<f64>()
            })?,
            FieldCase::Constant { c } => ScalarField::constant(grid.clone(), *c)?,
        };
        Ok(field)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub check: String,
    pub h: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_l2: Vec<f64>,
    /// Least-squares slope of `log residual` against `log h`; `None` when exact.
    pub order: Option<f64>,
    /// Same slope for the area-weighted L2 residual.
    pub order_l2: Option<f64>,
    /// Every residual is at or below `1e-9`.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub grids: Vec<GridDescriptor>,
    pub series: Vec<ConvergenceSeries>,
}

impl ConvergenceTable {
    pub fn get(&self, check: &str) -> Option<&ConvergenceSeries> {
        self.series.iter().find(|s| s.check == check)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,nr,nphi,h,residual_max,residual_l2,order,order_l2\n");
        let fmt = |o: Option<f64>| match o {
            Some(o) => format!("{o:.4}"),
            None => "exact".to_string(),
        };
        for s in &self.series {
            let (order, order_l2) = (fmt(s.order), fmt(s.order_l2));
            for (i, g) in self.grids.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{:e},{:e},{:e},{order},{order_l2}\n",
                    s.check, g.nr, g.nphi, s.h[i], s.residual[i], s.residual_l2[i]
                ));
            }
        }
        out
    }
}

/// Slope of the least-squares line through `(log h, log r)`.
pub fn least_squares_order(h: &[f64], r: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs every check of [`verify_bundle`] on a doubling sequence of grids.
pub fn convergence_study(case: &CaseDescriptor, sizes: &[(usize, usize)]) -> Result<ConvergenceTable, VerifierError> {
    let doubling = sizes.len() >= 3 && sizes.windows(2).all(|w| w[1].0 == 2 * w[0].0 && w[1].1 == 2 * w[0].1);
    if !doubling {
        return Err(VerifierError::BadSequence(sizes.to_vec()));
    }
    let cap = case.hyperboloid()?;
    let domain = Domain::Star(case.domain.clone());
    let mut grids = Vec::new();
    let mut runs = Vec::new();
    for &(nr, nphi) in sizes {
        let grid = Arc::new(build_grid(&domain, nr, nphi)?);
        let field = case.sample(&grid)?;
        let bundle = curvature_bundle(&field, case.k)?;
        let ctx = match &cap {
            Some(cap) => VerifyContext {
                c: cap.c(),
                theta0: cap.theta0(),
                cap: Some(cap.clone()),
                tolerances: case.tolerances,
            },
            None => VerifyContext::from_boundary(&bundle, case.tolerances),
        };
        grids.push(grid.descriptor());
        runs.push(verify_bundle(&bundle, &ctx));
    }
    let series = runs[0]
        .iter()
        .enumerate()
        .map(|(idx, first)| {
            let residual: Vec<f64> = runs.iter().map(|r| r[idx].residual_max).collect();
            let residual_l2: Vec<f64> = runs.iter().map(|r| r[idx].residual_l2).collect();
            let h: Vec<f64> = grids.iter().map(|g| g.h()).collect();
            let exact = residual.iter().all(|r| *r <= 1e-9);
            let slope = |r: &[f64]| {
                if exact || r.iter().any(|v| *v <= 0.0) {
                    None
                } else {
                    Some(least_squares_order(&h, r))
                }
            };
            ConvergenceSeries {
                check: first.check.clone(),
                order: slope(&residual),
                order_l2: slope(&residual_l2),
                h,
                residual,
                residual_l2,
                exact,
            }
        })
        .collect();
    Ok(ConvergenceTable { grids, series })
}
