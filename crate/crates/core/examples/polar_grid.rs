//! Polar grids over star-shaped domains: nodes, quadrature, derivatives, field files.

use std::sync::Arc;

use spacelike::discretization::{build_grid, differentiate, integrate, io, Domain, StarDomain2D};
use spacelike::ScalarField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ellipse = StarDomain2D::ellipse([0.0, 0.0], 1.0, 0.8, 32)?;
    let grid = Arc::new(build_grid(&Domain::Star(ellipse.clone()), 32, 64)?);
    println!(
        "{} nodes, inradius {:.4}, asymmetry {:.4}",
        grid.len(),
        ellipse.inradius(),
        ellipse.asymmetry()
    );

    let one = ScalarField::constant(grid.clone(), 1.0)?;
    println!(
        "area {:.10} (exact {:.10})",
        integrate(&one),
        std::f64::consts::PI * 0.8
    );

    // quadratics are differentiated exactly
    let q = ScalarField::from_fn(grid.clone(), |x| x[0] * x[1] + 0.5 * x[0] * x[0])?;
    let d = differentiate(&q);
    let worst = d
        .hessian
        .iter()
        .map(|h| {
            (h[(0, 0)] - 1.0)
                .abs()
                .max((h[(0, 1)] - 1.0).abs())
                .max(h[(1, 1)].abs())
        })
        .fold(0.0, f64::max);
    println!("Hessian error of x1 x2 + x1^2/2: {worst:.1e}");

    let path = std::env::temp_dir().join("spacelike_polar_grid.json");
    io::write_field(&q, &path)?;
    let back = io::read_field(&path)?;
    println!(
        "round trip through {}: identical = {}",
        path.display(),
        back.values() == q.values()
    );
    Ok(())
}
