//! σ_k of a matrix, its Newton tensor and the Gårding cone test.
//!
//! Run with `cargo run --example symmetric_functions`.

use spacelike::symfunc::{
    self, check_newton_maclaurin, identity_residuals, in_gamma_k_matrix, kronecker, newton_tensor, Spectrum,
    SquareMatrix,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = SquareMatrix::from_row_slice(3, &[2.0, 0.3, -0.1, 0.3, 1.0, 0.2, -0.1, 0.2, 0.5])?;

    let e = symfunc::sigmas(&a);
    for k in 1..=3 {
        println!(
            "sigma_{k} = {:+.12}   (Kronecker expansion {:+.12})",
            e[k],
            kronecker::sigma_by_kronecker(k, &a)
        );
    }

    let t = newton_tensor(2, &a)?;
    println!("\nNewton tensor (sigma_2)^i_j:\n{}", t.as_matrix());
    for k in 1..=3 {
        let r = identity_residuals(k, &a)?;
        println!("k = {k}: contraction identities hold to {:.1e}", r.max());
    }

    let lambda = Spectrum::of(&a, None)?;
    println!("\neigenvalues {:?}", lambda.values());
    for k in 1..=3 {
        let cone = in_gamma_k_matrix(&a, k);
        let nm = check_newton_maclaurin(&lambda, k)?;
        println!(
            "Gamma_{k}: inside = {}, margin {:.4}; Newton slack {:.4e}, violations {}",
            cone.inside, cone.margin, nm.newton_slack, nm.violations
        );
    }
    Ok(())
}
