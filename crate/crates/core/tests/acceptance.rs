//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! ```sh
//! cargo test --release -p poverty-fgt --test acceptance
//! ```

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use poverty_fgt::simulation::{paper_table, run_simulation, SimulationConfig};
use poverty_fgt::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sample(values: &[f64]) -> IncomeSample {
    IncomeSample::new(values.to_vec()).unwrap()
}

fn empirical_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.5)).collect();
        let z = rng.random_range(0.01..1.5);
        let alpha = match rng.random_range(0..4) {
            0 => 0.0,
            1 => rng.random_range(1..=4) as f64,
            _ => rng.random_range(0.0..4.0),
        };
        let got = empirical_fgt(&sample(&xs), &FgtParams::new(z, alpha).unwrap()).value;
        worst = worst.max((got - common::empirical(&xs, z, alpha)).abs());
    }
    outcome(
        worst < 1e-14,
        format!("max |difference| = {worst:.3e} over 1000 samples"),
    )
}

fn closed_form_index() -> Outcome {
    let u = uniform_01();
    let mut worst = 0.0f64;
    for k in 1..=9 {
        let z = k as f64 / 10.0;
        for alpha in 0..=3 {
            let q = true_fgt(&u, z, alpha as f64, 1e-10).unwrap();
            worst = worst.max((q - z / (alpha as f64 + 1.0)).abs());
        }
    }
    outcome(worst < 1e-9, format!("max |true_fgt - z/(α+1)| = {worst:.3e}"))
}

fn riemann_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = gaussian_kernel();
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(1..=50);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let z = rng.random_range(0.05..1.0);
        let h = rng.random_range(0.005..0.2);
        let alpha = [0.0, 1.0, 2.0, 3.0][rng.random_range(0..4)];
        let Some(m) = common::last_cell(z, h) else { continue };
        let s = sample(&xs);
        let p = FgtParams::new(z, alpha).unwrap();
        let s_n = common::riemann_sum(&xs, z, alpha, h, 0.5 * h * h, m);
        let total = bias_reduced_fgt(&s, &k, h, &p).unwrap().value + remainder_term(&s, &k, h, &p).unwrap();
        worst = worst.max((s_n - total).abs());
        checked += 1;
    }
    outcome(
        worst < 1e-12,
        format!("max |S_n - (P_n,b + V_n,b)| = {worst:.3e} over 100 cases"),
    )
}

fn degeneration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let k = gaussian_kernel();
    let flat = k.clone().with_second_moment(0.0);
    let (mut worst_mu, mut worst_lambda) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.random_range(1..=40);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let z = rng.random_range(0.05..1.0);
        let h = rng.random_range(0.005..0.3);
        let alpha = [0.0, 1.0, 2.0, 3.0][rng.random_range(0..4)];
        let s = sample(&xs);
        let p = FgtParams::new(z, alpha).unwrap();
        let cl = classical_kernel_fgt(&s, &k, h, &p).unwrap().value;
        let br = bias_reduced_fgt(&s, &flat, h, &p).unwrap().value;
        let ad = adaptive_kernel_fgt(&s, &k, h, &LocalFactors::unit(n), &p)
            .unwrap()
            .value;
        worst_mu = worst_mu.max((br - cl).abs());
        worst_lambda = worst_lambda.max((ad - cl).abs());
    }
    outcome(
        worst_mu < 1e-14 && worst_lambda < 1e-14,
        format!("μ₂ = 0: max diff {worst_mu:.3e}; unit λ: max diff {worst_lambda:.3e}"),
    )
}

fn consistency() -> Outcome {
    let k = gaussian_kernel();
    let z_grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
    let dists = [
        ("uniform", uniform_01()),
        ("pareto", truncated_pareto(0.02, 0.2, 1.0).unwrap()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d) in dists {
        let truth: Vec<Vec<f64>> = (0..3)
            .map(|a| {
                z_grid
                    .iter()
                    .map(|&z| true_fgt(&d, z, a as f64, 1e-10).unwrap())
                    .collect()
            })
            .collect();
        let mean_sup = |n: usize| -> Vec<(f64, f64)> {
            let h = default_bandwidth(n).unwrap();
            let mut sums = [0.0; 3];
            let mut max_sup = [0.0f64; 3];
            for seed in 1..=20u64 {
                let s = draw_sample(&d, n, seed).unwrap();
                let grid = estimators::KernelGrid::new(&s, &k, h, 0.7).unwrap();
                for a in 0..3 {
                    let sup = z_grid
                        .iter()
                        .zip(&truth[a])
                        .map(|(&z, &t)| (grid.bias_reduced(&FgtParams::new(z, a as f64).unwrap()).unwrap() - t).abs())
                        .fold(0.0, f64::max);
                    sums[a] += sup;
                    max_sup[a] = max_sup[a].max(sup);
                }
            }
            (0..3).map(|a| (sums[a] / 20.0, max_sup[a])).collect()
        };
        let small = mean_sup(1000);
        let large = mean_sup(20_000);
        for a in 0..3 {
            let decreasing = large[a].0 < small[a].0;
            let bounded = a == 0 || large[a].1 < 0.05;
            pass &= decreasing && bounded;
            parts.push(format!(
                "{name} α={a}: {:.2e} -> {:.2e} (worst seed {:.2e})",
                small[a].0, large[a].0, large[a].1
            ));
        }
    }
    outcome(pass, format!("mean sup error n=1000 -> n=20000; {}", parts.join("; ")))
}

fn variance_limit() -> Outcome {
    let k = gaussian_kernel();
    let config = SimulationConfig {
        distribution: DistributionSpec::Uniform,
        n: 2000,
        replications: 500,
        base_seed: 6,
        z_grid: vec![0.3, 0.5],
        alpha_grid: vec![0.0, 1.0],
        estimators: vec![EstimatorId::BiasReduced],
        ..SimulationConfig::paper_preset(6)
    };
    let report = run_simulation(&config).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (z, alpha) in [(0.3, 0.0), (0.5, 1.0)] {
        let p = report.true_value(z, alpha).unwrap();
        let p2 = true_fgt(&uniform_01(), z, 2.0 * alpha, 1e-10).unwrap();
        let limit = asymptotic_variance(&k, p, p2).value;
        let measured = 2000.0 * report.cell(z, alpha, EstimatorId::BiasReduced).unwrap().variance;
        let ok = ((measured - limit) / limit).abs() <= 0.2;
        pass &= ok;
        parts.push(format!(
            "(z={z}, α={alpha}): n·σ² = {measured:.5}, R(K)P(z,2α) - P² = {limit:.5}, P(z,2α) - P² = {:.5}",
            p2 - p * p
        ));
    }
    outcome(pass, parts.join("; "))
}

fn remainder_decay() -> Outcome {
    let k = gaussian_kernel();
    let params = FgtParams::new(0.5, 0.0).unwrap();
    let hs = [0.04, 0.02, 0.01];
    let mut sums = [0.0; 3];
    let reps = 200;
    for r in 0..reps {
        let s = draw_sample(&uniform_01(), 2000, replication_seed(7, r)).unwrap();
        for (sum, &h) in sums.iter_mut().zip(&hs) {
            *sum += remainder_term(&s, &k, h, &params).unwrap().abs();
        }
    }
    let means: Vec<f64> = sums.iter().map(|s| s / reps as f64).collect();
    let ratios: Vec<f64> = means.iter().zip(&hs).map(|(m, h)| m / h).collect();
    let decreasing = means[0] > means[1] && means[1] > means[2];
    let spread = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        decreasing && spread < 3.0,
        format!(
            "mean|V| = {:.6}, {:.6}, {:.6} at h = 0.04, 0.02, 0.01; mean|V|/h spread factor {spread:.3}",
            means[0], means[1], means[2]
        ),
    )
}

fn table_ordering() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 1..=5 {
        let started = Instant::now();
        let table = paper_table(&SimulationConfig::paper_preset(seed)).unwrap();
        slowest = slowest.max(started.elapsed());
        let report = &table.report;
        let (mut mse_wins, mut var_wins) = (0, 0);
        for &z in &report.config.z_grid {
            for &alpha in &report.config.alpha_grid {
                let cell = |e| report.cell(z, alpha, e).unwrap();
                mse_wins += (cell(EstimatorId::BiasReduced).mse <= cell(EstimatorId::Classical).mse) as usize;
                var_wins += (cell(EstimatorId::BiasReduced).variance <= cell(EstimatorId::Adaptive).variance) as usize;
            }
        }
        pass &= mse_wins >= 17 && var_wins >= 17;
        parts.push(format!("seed {seed}: mse {mse_wins}/21, σ² {var_wins}/21"));
    }
    pass &= slowest < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "mse(br) <= mse(cl) and σ²(br) <= σ²(ad) counts: {}; slowest seed {:.1}s",
            parts.join(", "),
            slowest.as_secs_f64()
        ),
    )
}

fn efficiency_below_one() -> Outcome {
    let k = gaussian_kernel();
    let mut tested = 0;
    let mut worst = f64::NEG_INFINITY;
    let dists = [uniform_01(), truncated_pareto(0.02, 0.2, 1.0).unwrap()];
    for d in &dists {
        for zi in 1..=9 {
            let z = zi as f64 / 10.0;
            for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
                let p = true_fgt(d, z, alpha, 1e-10).unwrap();
                let p2 = true_fgt(d, z, 2.0 * alpha, 1e-10).unwrap();
                if p2 - p * p > 0.0 {
                    worst = worst.max(efficiency(&k, p, p2).unwrap());
                    tested += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let p2: f64 = rng.random_range(1e-9..1.0);
        let p = rng.random_range(0.0..=1.0) * p2.sqrt();
        if p2 - p * p > 0.0 {
            worst = worst.max(efficiency(&k, p, p2).unwrap());
            tested += 1;
        }
    }
    outcome(
        worst < 1.0,
        format!(
            "max e(z,α) = {worst:.5} over {tested} pairs; R(K) = {:.7}",
            k.square_integral()
        ),
    )
}

fn determinism() -> Outcome {
    let run = |threads: &str| -> String {
        let out = Command::new(env!("CARGO_BIN_EXE_fgt"))
            .args([
                "simulate",
                "--paper-table",
                "--seed",
                "1",
                "--format",
                "json",
                "--threads",
                threads,
            ])
            .env_remove("FGT_OUTPUT_DIR")
            .output()
            .expect("fgt runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let doc = String::from_utf8(out.stdout).unwrap();
        // The body is everything before the timing metadata.
        let cut = doc.find("\n  \"metadata\":").expect("metadata entry");
        doc[..cut].to_string()
    };
    let a = run("1");
    let b = run("1");
    let c = run("8");
    outcome(
        a == b && a == c,
        format!(
            "body {} bytes; 1 thread x2 and 8 threads identical: {}",
            a.len(),
            a == b && a == c
        ),
    )
}

type Criterion = (u32, &'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "empirical estimator oracle equivalence", 1.0, empirical_oracle),
        (2, "closed-form index, uniform", 1.0, closed_form_index),
        (3, "Riemann decomposition identity", 5.0, riemann_identity),
        (4, "degeneration to the classical estimator", 5.0, degeneration),
        (5, "consistency as n grows", 120.0, consistency),
        (6, "limiting variance", 120.0, variance_limit),
        (7, "remainder decay", 60.0, remainder_decay),
        (8, "reference-table ordering", 600.0, table_ordering),
        (9, "efficiency below one", 10.0, efficiency_below_one),
        (10, "determinism across runs and threads", 600.0, determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let started = Instant::now();
        let result = check();
        let secs = started.elapsed().as_secs_f64();
        let pass = result.pass && secs < budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {name} ({secs:.2}s, limit {budget}s): {}",
            if pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
