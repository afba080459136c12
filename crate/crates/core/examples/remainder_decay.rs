//! The grid estimator as a Riemann sum: `S_n = P_{n,b} + V_{n,b}`, and the
//! boundary remainder shrinking with the bandwidth.
//!
//! ```sh
//! cargo run --release --example remainder_decay
//! ```

use poverty_fgt::*;

fn main() -> Result<()> {
    let kernel = gaussian_kernel();
    let params = FgtParams::new(0.5, 0.0)?;
    let reps = 200;
    println!("{:>6} {:>8} {:>12} {:>12}", "h", "[z/h]", "mean |V|", "mean |V|/h");
    for h in [0.08, 0.04, 0.02, 0.01, 0.005] {
        let mut total = 0.0;
        for r in 0..reps {
            let s = draw_sample(&uniform_01(), 2000, replication_seed(7, r))?;
            total += remainder_term(&s, &kernel, h, &params)?.abs();
        }
        let mean = total / reps as f64;
        println!("{h:>6} {:>8} {mean:>12.6} {:>12.4}", grid_cells(0.5, h)?, mean / h);
    }
    Ok(())
}
