//! Load incomes from a delimited file and estimate the index.
//!
//! ```sh
//! cargo run --example estimate_from_file -- incomes.csv 0.4 1
//! ```
//!
//! Without arguments a small demo file is written to a temporary directory.

use std::path::PathBuf;

use poverty_fgt::io::{read_income_file, LoadOptions};
use poverty_fgt::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = match args.next() {
        Some(p) => PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("fgt-demo-incomes.csv");
            std::fs::write(
                &p,
                "household,income\n1,0.12\n2,0.35\n3,-1\n4,0.08\n5,0.51\n6,0.27\n7,0.9\n",
            )?;
            p
        }
    };
    let z: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.4);
    let alpha: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);

    let demo = LoadOptions {
        header: true,
        column: 1,
        ..LoadOptions::default()
    };
    let options = if path.ends_with("fgt-demo-incomes.csv") {
        demo
    } else {
        LoadOptions::default()
    };
    let file = read_income_file(&path, &options)?;
    for e in &file.row_errors {
        eprintln!("skipped: {e}");
    }
    let sample = file.into_sample()?;
    let params = FgtParams::new(z, alpha)?;
    let kernel = gaussian_kernel();
    let h = default_bandwidth(sample.len())?;

    let estimates = [
        empirical_fgt(&sample, &params),
        classical_kernel_fgt(&sample, &kernel, h, &params)?,
        bias_reduced_fgt(&sample, &kernel, h, &params)?,
    ];
    for est in &estimates {
        println!("{:>13}: {:.6}", est.estimator.as_str(), est.value);
        for w in &est.warnings {
            println!("{:>13}  warning: {w}", "");
        }
    }
    Ok(())
}
