//! Exact poverty index of the model distributions by adaptive quadrature.
//!
//! ```sh
//! cargo run --example true_index
//! ```

use poverty_fgt::{true_fgt, truncated_pareto, uniform_01};

fn main() -> Result<(), poverty_fgt::FgtError> {
    let pareto = truncated_pareto(0.02, 0.2, 1.0)?;
    let uniform = uniform_01();
    println!(
        "{:>5} {:>5} {:>14} {:>14} {:>14}",
        "z", "alpha", "uniform", "z/(alpha+1)", "pareto"
    );
    for alpha in [0.0, 1.0, 2.0] {
        for z in [0.1, 0.3, 0.5, 0.7] {
            println!(
                "{z:>5} {alpha:>5} {:>14.10} {:>14.10} {:>14.10}",
                true_fgt(&uniform, z, alpha, 1e-10)?,
                z / (alpha + 1.0),
                true_fgt(&pareto, z, alpha, 1e-10)?
            );
        }
    }
    Ok(())
}
