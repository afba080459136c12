//! The four estimators on one truncated Pareto sample against the exact index.
//!
//! ```sh
//! cargo run --release --example compare_estimators -- [n] [seed]
//! ```

use poverty_fgt::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let dist = truncated_pareto(0.02, 0.2, 1.0)?;
    let sample = draw_sample(&dist, n, seed)?;
    let kernel = gaussian_kernel();
    let h = default_bandwidth(n)?;
    let factors = local_bandwidth_factors(&sample, &kernel, h, 0.5)?;
    println!("n = {n}, seed = {seed}, h = {h:.6}");
    println!(
        "{:>4} {:>5} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "z", "alpha", "true", "empirical", "classical", "adaptive", "bias_red"
    );
    for alpha in [0.0, 1.0, 2.0] {
        for z in [0.1, 0.3, 0.5, 0.7] {
            let p = FgtParams::new(z, alpha)?;
            println!(
                "{z:>4} {alpha:>5} {:>11.6} {:>11.6} {:>11.6} {:>11.6} {:>11.6}",
                true_fgt(&dist, z, alpha, 1e-10)?,
                empirical_fgt(&sample, &p).value,
                classical_kernel_fgt(&sample, &kernel, h, &p)?.value,
                adaptive_kernel_fgt(&sample, &kernel, h, &factors, &p)?.value,
                bias_reduced_fgt(&sample, &kernel, h, &p)?.value,
            );
        }
    }
    Ok(())
}
