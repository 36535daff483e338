//! Radially symmetric solutions of `H_k = 1` over the unit ball in `R^n`.

use spacelike::solver::{radial_exact, solve_radial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 2)] {
        let p = solve_radial(n, k, 1.0, 1.0, 0.0)?;
        let err =
            p.r.iter()
                .zip(&p.u)
                .map(|(r, u)| (u - radial_exact(k, 1.0, 1.0, 0.0, *r)).abs())
                .fold(0.0, f64::max);
        println!(
            "n = {n}, k = {k}: u(0) = {:.12}, max|u'| = {:.6}, error vs cap {err:.1e}, {} nodes",
            p.center_value(),
            p.max_slope(),
            p.r.len()
        );
    }
    // a smaller H_k flattens the profile
    let flat = solve_radial(3, 2, 0.01, 1.0, 0.0)?;
    println!("H_2 = 0.01: u(0) = {:.6}", flat.center_value());
    Ok(())
}
