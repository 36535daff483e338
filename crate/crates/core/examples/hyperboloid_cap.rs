//! The umbilic cap `u = c + θ₀ + √(1 + |x|²)` and its sampled geometry.

use std::sync::Arc;

use spacelike::discretization::{build_grid, Domain};
use spacelike::geometry::curvature_bundle;
use spacelike::HyperboloidCap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cap = HyperboloidCap::from_angle(2, 0.0, -std::f64::consts::SQRT_2, &[0.0, 0.0])?;
    println!("radius {}, P = -c - theta0 = {}", cap.radius(), cap.p_value());

    let exact = cap.analytic_point(&[0.3, -0.4])?;
    println!(
        "at x = (0.3, -0.4): u = {:.6}, theta = {:.6}, principal curvatures {:?}, H_k {:?}",
        exact.u, exact.theta, exact.lambda, exact.hk
    );

    for (nr, nphi) in [(16, 32), (32, 64), (64, 128)] {
        let grid = Arc::new(build_grid(&Domain::Star(cap.disk_domain()?), nr, nphi)?);
        let bundle = curvature_bundle(&cap.sample_to_grid(&grid)?, 2)?;
        let shape = bundle
            .nodes()
            .iter()
            .map(|n| (n.shape - nalgebra::Matrix2::identity()).amax())
            .fold(0.0, f64::max);
        let p = bundle.p_function();
        println!(
            "{nr:>3}x{nphi:<3}  max|A - I| = {shape:.3e}  P in [{:.6}, {:.6}]",
            p.min(),
            p.max()
        );
    }
    Ok(())
}
