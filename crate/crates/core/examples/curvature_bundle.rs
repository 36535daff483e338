//! Pointwise geometry of a general spacelike graph.

use std::sync::Arc;

use spacelike::discretization::{build_grid, Domain, StarDomain2D};
use spacelike::geometry::{curvature_bundle, elliptic_operator, weingarten_residual};
use spacelike::ScalarField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, 0.1, 3)?;
    let grid = Arc::new(build_grid(&Domain::Star(domain), 48, 96)?);
    let u = ScalarField::from_fn(grid.clone(), |x| 0.2 * (x[0] * x[0] + 1.5 * x[1] * x[1]) + 0.1 * x[0])?;

    let bundle = curvature_bundle(&u, 2)?;
    let range = |f: ScalarField| (f.min(), f.max());
    println!("theta in {:?}", range(bundle.theta()));
    println!("P     in {:?}", range(bundle.p_function()));
    println!("H_1   in {:?}", range(bundle.scalar(|n| n.hk(1))));
    println!("H_2   in {:?}", range(bundle.scalar(|n| n.hk(2))));

    let node = &bundle.nodes()[grid.index(10, 7)];
    println!(
        "\nnode {:?}\n  normal {:?}\n  principal curvatures {:?}",
        node.x, node.normal, node.lambda
    );

    println!("\nWeingarten residual: {:?}", weingarten_residual(&bundle));
    let lu = elliptic_operator(&bundle, bundle.field())?;
    println!(
        "(sigma_2)^ij u_;ij ranges over [{:.4}, {:.4}]",
        lu.values.min(),
        lu.values.max()
    );
    Ok(())
}
