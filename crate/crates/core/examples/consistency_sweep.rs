//! Median mse over the reference grid as the sample size doubles.
//!
//! ```sh
//! cargo run --release --example consistency_sweep -- [replications]
//! ```

use poverty_fgt::simulation::{run_simulation, SimulationConfig};
use poverty_fgt::EstimatorId;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(200);
    println!(
        "{:>6} {:>14} {:>14} {:>14} {:>14}",
        "n", "empirical", "classical", "adaptive", "bias_reduced"
    );
    for n in [1000, 2000, 4000] {
        let config = SimulationConfig {
            n,
            replications: reps,
            estimators: EstimatorId::ALL.to_vec(),
            ..SimulationConfig::paper_preset(42)
        };
        let started = std::time::Instant::now();
        let report = run_simulation(&config)?;
        print!("{n:>6}");
        for e in EstimatorId::ALL {
            let mses = report
                .cells
                .iter()
                .filter(|c| c.estimator == e)
                .map(|c| c.mse)
                .collect();
            print!(" {:>14.6e}", median(mses));
        }
        println!("   ({:.1}s)", started.elapsed().as_secs_f64());
    }
    Ok(())
}
