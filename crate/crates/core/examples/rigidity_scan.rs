//! Only balls carry a constant boundary angle: spread of θ on ∂Ω over ellipses
//! and perturbed disks.

use spacelike::discretization::{Domain, StarDomain2D};
use spacelike::solver::{ellipse_family, rigidity_scan, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ellipses = ellipse_family(&[1.0, 1.1, 1.2, 1.3, 1.4, 1.5], 32)?;
    let base = SolverConfig::new(Domain::Star(ellipses[0].clone()), 1, 1.0, 0.0).with_grid(32, 64);
    let table = rigidity_scan(&ellipses, &base);
    print!("{}", table.to_csv());
    println!("{}\n", table.trend());

    let bumps: Vec<StarDomain2D> = [0.0, 0.05, 0.1]
        .iter()
        .map(|e| StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, *e, 3))
        .collect::<Result<_, _>>()?;
    print!("{}", rigidity_scan(&bumps, &base).to_csv());
    Ok(())
}
