//! Observed orders of the discrete checks under grid doubling.

use spacelike::verifier::{convergence_study, CaseDescriptor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = CaseDescriptor::cap(0.0, -std::f64::consts::SQRT_2, 2)?;
    let table = convergence_study(&case, &[(16, 32), (32, 64), (64, 128)])?;
    for s in &table.series {
        let show = |o: Option<f64>| o.map_or("-".to_string(), |v| format!("{v:.2}"));
        let order = if s.exact { "exact".to_string() } else { show(s.order) };
        println!(
            "{:<32} {:>10.3e}  order {order:>5}  (L2 order {})",
            s.check,
            s.residual.last().unwrap(),
            show(s.order_l2)
        );
    }
    Ok(())
}
