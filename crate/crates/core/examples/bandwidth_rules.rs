//! The two bandwidth rules and where they sit relative to the regime
//! `n h² / ln ln n → ∞`.
//!
//! ```sh
//! cargo run --example bandwidth_rules
//! ```

use poverty_fgt::estimators::regime_ratio;
use poverty_fgt::{default_bandwidth, lil_bandwidth};

fn main() -> Result<(), poverty_fgt::FgtError> {
    println!(
        "{:>9} {:>12} {:>10} {:>12} {:>10}",
        "n", "h (nlogn)", "ratio", "h (lil)", "ratio"
    );
    for n in [100, 1_000, 10_000, 100_000, 1_000_000, 10_000_000] {
        let a = default_bandwidth(n)?;
        let b = lil_bandwidth(n)?;
        println!(
            "{n:>9} {a:>12.7} {:>10.4} {b:>12.7} {:>10.1}",
            regime_ratio(n, a),
            regime_ratio(n, b)
        );
    }
    Ok(())
}
