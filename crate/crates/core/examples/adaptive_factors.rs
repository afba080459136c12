//! Local bandwidth factors for the adaptive estimator: narrower where the
//! pilot density is high, wider in sparse regions, geometric mean one.
//!
//! ```sh
//! cargo run --release --example adaptive_factors -- [sensitivity]
//! ```

use poverty_fgt::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let sensitivity: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.5);
    let sample = draw_sample(&truncated_pareto(0.02, 0.2, 1.0)?, 1000, 11)?;
    let kernel = gaussian_kernel();
    let h = default_bandwidth(sample.len())?;
    let factors = local_bandwidth_factors(&sample, &kernel, h, sensitivity)?;

    let mut pairs: Vec<(f64, f64)> = sample
        .values()
        .iter()
        .copied()
        .zip(factors.lambdas().iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!(
        "pilot h = {h:.6}, sensitivity = {sensitivity}, geometric mean = {:.6}",
        factors.geometric_mean()
    );
    println!("{:>10} {:>10} {:>12}", "income", "lambda", "local h");
    for (x, l) in pairs.iter().step_by(100) {
        println!("{x:>10.5} {l:>10.4} {:>12.6}", l * h);
    }
    Ok(())
}
