//! Every residual check on a sampled hyperboloid cap.

use std::sync::Arc;

use spacelike::discretization::{build_grid, Domain};
use spacelike::geometry::curvature_bundle;
use spacelike::verifier::{all_pass, reports_to_csv, verify_bundle, Tolerances, VerifyContext};
use spacelike::HyperboloidCap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let theta0 = -std::f64::consts::SQRT_2;
    let cap = HyperboloidCap::from_angle(2, 0.0, theta0, &[0.0, 0.0])?;
    let grid = Arc::new(build_grid(&Domain::Star(cap.disk_domain()?), 64, 128)?);
    for k in [1, 2] {
        let bundle = curvature_bundle(&cap.sample_to_grid(&grid)?, k)?;
        let ctx = VerifyContext {
            c: 0.0,
            theta0,
            cap: Some(cap.clone()),
            tolerances: Tolerances::default(),
        };
        let reports = verify_bundle(&bundle, &ctx);
        println!("k = {k}: all pass = {}", all_pass(&reports));
        print!("{}", reports_to_csv(&reports));
        println!();
    }
    Ok(())
}
