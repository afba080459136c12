//! Classical and bias-corrected density estimates side by side. The corrected
//! estimate may dip below zero in the tails; it is reported unclipped.
//!
//! ```sh
//! cargo run --release --example density_correction
//! ```

use poverty_fgt::*;

fn main() -> Result<()> {
    let sample = draw_sample(&uniform_01(), 500, 3)?;
    let kernel = gaussian_kernel();
    let h = 0.08;
    println!("{:>6} {:>10} {:>10}", "x", "classical", "corrected");
    for k in -4..=24 {
        let x = k as f64 * 0.05;
        println!(
            "{x:>6.2} {:>10.5} {:>10.5}",
            classical_density(&sample, &kernel, h, x)?,
            bias_corrected_density(&sample, &kernel, h, x)?
        );
    }
    Ok(())
}
