use std::path::Path;
use std::process::{Command, Output};

fn fgt(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fgt"));
    cmd.args(args).env_remove("FGT_OUTPUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn income_file(dir: &Path, contents: &str) -> String {
    let path = dir.join("incomes.csv");
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn estimate_empirical() {
    let dir = tempfile::tempdir().unwrap();
    let input = income_file(dir.path(), "0.1\n0.2\n0.3\n");
    let o = fgt(
        &[
            "estimate",
            "--input",
            &input,
            "--z",
            "0.25",
            "--alpha",
            "1",
            "--estimator",
            "empirical",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("0.266667"), "{}", stdout(&o));
}

#[test]
fn estimate_flags_fractional_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let input = income_file(dir.path(), "0.1\n0.2\n0.3\n");
    let o = fgt(
        &[
            "estimate",
            "--input",
            &input,
            "--z",
            "0.25",
            "--alpha",
            "0.5",
            "--estimator",
            "bias-reduced",
        ],
        &[],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("alpha outside α=0 or α≥1 theory"));
    assert!(out.contains("h: "));
    assert!(out.contains("[z/h]: "));
}

#[test]
fn estimate_rejects_zero_poverty_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = income_file(dir.path(), "0.1\n");
    let o = fgt(&["estimate", "--input", &input, "--z", "0", "--alpha", "1"], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("poverty line"));
}

#[test]
fn estimate_json_and_row_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = income_file(dir.path(), "income\n0.1\n-5\n0.3\n");
    let o = fgt(
        &[
            "estimate",
            "--input",
            &input,
            "--header",
            "--z",
            "0.25",
            "--alpha",
            "0",
            "--estimator",
            "empirical",
            "--format",
            "json",
        ],
        &[],
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["estimate"]["value"], 0.5);
    assert_eq!(v["row_errors"][0], "negative income at line 3");
    assert!(stderr(&o).contains("negative income at line 3"));

    let strict = fgt(
        &[
            "estimate", "--input", &input, "--header", "--z", "0.25", "--alpha", "0", "--strict",
        ],
        &[],
    );
    assert!(!strict.status.success());
}

#[test]
fn estimate_missing_file_fails() {
    let o = fgt(
        &[
            "estimate",
            "--input",
            "/nonexistent/x.csv",
            "--z",
            "0.5",
            "--alpha",
            "1",
        ],
        &[],
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn out_report_echoes_configuration_under_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let input = income_file(dir.path(), "0.1\n0.2\n0.3\n0.6\n");
    let o = fgt(
        &[
            "estimate",
            "--input",
            &input,
            "--z",
            "0.5",
            "--alpha",
            "2",
            "--estimator",
            "adaptive",
            "--out",
            "nested/est.json",
        ],
        &[("FGT_OUTPUT_DIR", dir.path())],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("nested/est.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let config = &v["config"];
    assert_eq!(config["estimator"], "adaptive");
    assert_eq!(config["kernel"], "gaussian");
    assert_eq!(config["bandwidth_rule"], "nlogn");
    assert_eq!(config["adaptive_sensitivity"], 0.5);
    assert!(config["bandwidth"].as_f64().unwrap() > 0.0);
    assert_eq!(config["pilot_bandwidth"], config["bandwidth"]);
}

#[test]
fn simulate_rejects_single_replication() {
    let o = fgt(&["simulate", "--reps", "1"], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("R = 1"));
}

#[test]
fn simulate_small_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.toml");
    std::fs::write(
        &config,
        r#"
n = 200
replications = 4
base_seed = 9
z_grid = [0.25, 0.5]
alpha_grid = [0.0, 1.0]
estimators = ["empirical", "bias_reduced"]

[distribution]
kind = "uniform"
"#,
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let o = fgt(
        &[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--format",
            "csv",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 2 * 2);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let echoed = &v["report"]["config"];
    assert_eq!(echoed["n"], 200);
    assert_eq!(echoed["bandwidth_rule"], "nlogn");
    assert_eq!(echoed["adaptive_sensitivity"], 0.5);
    assert_eq!(echoed["seed_mode"], "per_replication");
    assert!(v["metadata"]["wall_clock_seconds"].is_number());

    // The echoed configuration re-runs to the same body.
    let rerun = dir.path().join("rerun.json");
    std::fs::write(&rerun, echoed.to_string()).unwrap();
    let o2 = fgt(
        &["simulate", "--config", rerun.to_str().unwrap(), "--format", "json"],
        &[],
    );
    assert!(o2.status.success(), "{}", stderr(&o2));
    let v2: serde_json::Value = serde_json::from_str(&stdout(&o2)).unwrap();
    assert_eq!(v["report"], v2["report"]);
}

#[test]
fn efficiency_uniform_example() {
    let o = fgt(
        &[
            "efficiency",
            "--dist",
            "uniform",
            "--z",
            "0.5",
            "--alpha",
            "1",
            "--format",
            "json",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["p_z_alpha"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!((v["p_z_2alpha"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-10);
    assert!((v["asymptotic_variance"].as_f64().unwrap() + 0.015_484_2).abs() < 1e-7);
    assert!(v["warnings"][0].as_str().unwrap().contains("negative"));
}

#[test]
fn efficiency_headcount_and_degenerate() {
    let o = fgt(
        &[
            "efficiency",
            "--dist",
            "pareto",
            "--z",
            "0.5",
            "--alpha",
            "0",
            "--format",
            "json",
        ],
        &[],
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["p_z_alpha"], v["p_z_2alpha"]);

    // Below the support both indices vanish and the ratio is undefined.
    let o = fgt(&["efficiency", "--dist", "pareto", "--z", "0.01", "--alpha", "1"], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("degenerate"));
}

#[test]
fn kernel_info_reports_checks() {
    let o = fgt(&["kernel-info"], &[]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("square integral R(K) = 0.2820947918"));
    assert!(out.contains("H6"));
    let o = fgt(&["kernel-info", "--kernel", "epanechnikov"], &[]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown kernel"));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = fgt(&["estimate", "--z", "0.5"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = fgt(
        &[
            "estimate", "--input", "x", "--z", "0.5", "--alpha", "1", "--format", "yaml",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}
