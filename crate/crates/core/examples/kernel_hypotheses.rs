//! Kernel constants and the regularity checks run on `K` and `K''`.
//!
//! ```sh
//! cargo run --example kernel_hypotheses
//! ```

use poverty_fgt::gaussian_kernel;
use poverty_fgt::kernels::{verify_hypotheses, CheckStatus, Kernel};

fn show(kernel: &Kernel) -> Result<(), poverty_fgt::FgtError> {
    let report = verify_hypotheses(kernel, 1e-10)?;
    println!(
        "{}: mu2 = {}, R(K) = {:.10}",
        kernel.name(),
        kernel.second_moment(),
        kernel.square_integral()
    );
    for c in &report.checks {
        let mark = match c.status {
            CheckStatus::Pass => "ok  ",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Informational => "info",
        };
        println!("  {mark} {:?}/{:?}: {}", c.hypothesis, c.function, c.detail);
    }
    println!("  all checkable hypotheses hold: {}\n", report.all_checkable_pass());
    Ok(())
}

fn main() -> Result<(), poverty_fgt::FgtError> {
    show(&gaussian_kernel())?;

    // A Gaussian with a deliberately wrong stored second moment.
    let mislabeled = gaussian_kernel().with_second_moment(2.0);
    show(&mislabeled)?;

    // The triangle kernel's K'' vanishes almost everywhere, so the correction is inert.
    let triangle = Kernel::new(
        "triangle",
        |u: f64| (1.0 - u.abs()).max(0.0),
        |_| 0.0,
        1.0 / 6.0,
        2.0 / 3.0,
        1.0,
    );
    show(&triangle)
}
