//! Newton solve of `H_k = 1`, `u = 0` on the unit disk, against the closed-form cap.

use spacelike::discretization::{Domain, StarDomain2D};
use spacelike::solver::{solution_bundle, solve_dirichlet, SolverConfig};
use spacelike::verifier::{check_k_convexity, check_p_function, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let disk = Domain::Star(StarDomain2D::disk([0.0, 0.0], 1.0)?);
    for k in [1, 2] {
        let config = SolverConfig::new(disk.clone(), k, 1.0, 0.0).with_grid(64, 128);
        let r = solve_dirichlet(&config)?;
        println!("k = {k}");
        println!("  residual history {:?}", r.history);
        println!(
            "  u(0) = {:.8}  (cap: {:.8})",
            r.solution.center_value(),
            1.0 - 2f64.sqrt()
        );
        println!(
            "  boundary theta mean {:.8} (cap: {:.8}), spread {:.1e}",
            r.angle.mean,
            -(2f64.sqrt()),
            r.angle.spread
        );

        let bundle = solution_bundle(&r)?;
        for rep in std::iter::once(check_k_convexity(&bundle)).chain(check_p_function(&bundle, &Tolerances::default()))
        {
            println!("  {} {:.2e} pass={}", rep.check, rep.residual_max, rep.pass);
        }
    }
    Ok(())
}
