//! Limiting variance and efficiency relative to the empirical estimator.
//!
//! ```sh
//! cargo run --example efficiency
//! ```

use poverty_fgt::*;

fn main() -> Result<()> {
    let kernel = gaussian_kernel();
    let dist = truncated_pareto(0.02, 0.2, 1.0)?;
    println!("R(K) = {:.7}", kernel.square_integral());
    println!(
        "{:>4} {:>5} {:>10} {:>10} {:>12} {:>10}",
        "z", "alpha", "P(z,a)", "P(z,2a)", "variance", "e(z,a)"
    );
    for alpha in [0.0, 1.0, 2.0] {
        for z in [0.1, 0.4, 0.7] {
            let p = true_fgt(&dist, z, alpha, 1e-10)?;
            let p2 = true_fgt(&dist, z, 2.0 * alpha, 1e-10)?;
            let v = asymptotic_variance(&kernel, p, p2);
            let e = efficiency(&kernel, p, p2)?;
            println!("{z:>4} {alpha:>5} {p:>10.6} {p2:>10.6} {:>12.6} {e:>10.5}", v.value);
            for w in v.warnings {
                println!("      warning: {w}");
            }
        }
    }
    Ok(())
}
