//! The reference Monte Carlo design: n = 1000, 50 replications, truncated
//! Pareto(0.02, 0.2) incomes, mse and variance per poverty line and aversion.
//!
//! ```sh
//! cargo run --release --example paper_table -- [seed]
//! ```

use poverty_fgt::{paper_table, SimulationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let table = paper_table(&SimulationConfig::paper_preset(seed))?;
    print!("{}", table.render_text());
    Ok(())
}
