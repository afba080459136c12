//! Command-line front end: `estimate`, `simulate`, `efficiency`, `kernel-info`.
//!
//! Each subcommand prints its result to stdout in the requested `--format`.
//! With `--out`, a JSON report carrying the full effective configuration is
//! also written, so any result can be re-run from its own report. Relative
//! `--out` paths are resolved against `FGT_OUTPUT_DIR` when it is set.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::distributions::{true_fgt, DistributionSpec, DEFAULT_TOL};
use crate::error::{FgtError, Result};
use crate::estimators::{
    adaptive_kernel_fgt, asymptotic_variance, bias_reduced_fgt, classical_kernel_fgt, efficiency, empirical_fgt,
    local_bandwidth_factors, BandwidthRule, EstimatorId, FgtEstimate, FgtParams,
};
use crate::io::{read_income_file, Delimiter, LoadOptions};
use crate::kernels::{kernel_by_name, verify_hypotheses, CheckStatus, Hypothesis};
use crate::simulation::{run_simulation_with_threads, PaperTable, SimulationConfig, SimulationReport};

pub const OUTPUT_DIR_ENV: &str = "FGT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "fgt", version, about = "Kernel estimators of the FGT poverty index")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Kernel name.
    #[arg(long, default_value = "gaussian", global = true)]
    pub kernel: String,
    /// Base seed for random sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write a JSON report with the effective configuration to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base directory for relative `--out` paths.
    #[arg(long, env = OUTPUT_DIR_ENV, global = true, hide_env_values = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads for the simulation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the index from an income file.
    Estimate(EstimateArgs),
    /// Run the Monte Carlo comparison of the estimators.
    Simulate(SimulateArgs),
    /// Exact index, limiting variance and efficiency for a model distribution.
    Efficiency(EfficiencyArgs),
    /// Kernel constants and hypothesis checks.
    KernelInfo(KernelInfoArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Income file, one observation per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Poverty line.
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    /// Poverty aversion parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// empirical, classical, adaptive or bias-reduced.
    #[arg(long, default_value = "bias-reduced")]
    pub estimator: EstimatorId,
    /// nlogn, lil or a fixed positive value.
    #[arg(long, default_value = "nlogn")]
    pub bandwidth: BandwidthRule,
    /// Sensitivity of the adaptive bandwidth factors.
    #[arg(long, default_value_t = crate::simulation::DEFAULT_SENSITIVITY)]
    pub sensitivity: f64,
    /// Pilot bandwidth for the adaptive factors (default: the main bandwidth).
    #[arg(long)]
    pub pilot_bandwidth: Option<f64>,
    /// Skip the first nonblank line.
    #[arg(long)]
    pub header: bool,
    /// Zero-based column holding the incomes.
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    /// auto, comma, whitespace, tab, semicolon or a single character.
    #[arg(long, default_value = "auto", value_parser = parse_delimiter)]
    pub delimiter: Delimiter,
    /// Fail on any malformed row.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Reference design: n = 1000, R = 50, Pareto(0.02, 0.2) on [0.02, 1], z = 0.1..0.7, alpha = 0, 1, 2.
    #[arg(long, conflicts_with = "config")]
    pub paper_table: bool,
    /// JSON (.json) or TOML config file with the simulation fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sample size per replication.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated poverty lines.
    #[arg(long, value_delimiter = ',')]
    pub z_grid: Option<Vec<f64>>,
    /// Comma-separated aversion parameters.
    #[arg(long, value_delimiter = ',')]
    pub alpha_grid: Option<Vec<f64>>,
    /// Comma-separated estimator names.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<EstimatorId>>,
    /// nlogn, lil or a fixed positive value.
    #[arg(long)]
    pub bandwidth: Option<BandwidthRule>,
    /// Sensitivity of the adaptive bandwidth factors.
    #[arg(long)]
    pub sensitivity: Option<f64>,
    #[command(flatten)]
    pub dist: DistArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Uniform,
    Pareto,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Model distribution.
    #[arg(long)]
    pub dist: Option<DistKind>,
    /// Pareto scale (lower support bound).
    #[arg(long, default_value_t = 0.02)]
    pub x0: f64,
    /// Pareto shape.
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,
    /// Pareto truncation point.
    #[arg(long, default_value_t = 1.0)]
    pub upper: f64,
}

impl DistArgs {
    fn spec(&self) -> Option<DistributionSpec> {
        self.dist.map(|kind| match kind {
            DistKind::Uniform => DistributionSpec::Uniform,
            DistKind::Pareto => DistributionSpec::Pareto {
                x0: self.x0,
                beta: self.beta,
                upper: self.upper,
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Absolute tolerance of the quadrature.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub dist: DistArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KernelInfoArgs {
    /// Tolerance for the integral checks.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

fn parse_delimiter(s: &str) -> std::result::Result<Delimiter, String> {
    match s {
        "auto" => Ok(Delimiter::Auto),
        "whitespace" | "space" => Ok(Delimiter::Whitespace),
        "comma" => Ok(Delimiter::Char(',')),
        "tab" => Ok(Delimiter::Char('\t')),
        "semicolon" => Ok(Delimiter::Char(';')),
        other => {
            let mut chars = other.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(Delimiter::Char(c)),
                _ => Err(format!("unknown delimiter `{other}`")),
            }
        }
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            1
        }
    }
}

/// Run a parsed command, writing the rendered result to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Estimate(args) => cmd_estimate(args, out),
        Command::Simulate(args) => cmd_simulate(args, out),
        Command::Efficiency(args) => cmd_efficiency(args, out),
        Command::KernelInfo(args) => cmd_kernel_info(args, out),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FgtError + '_ {
    move |source| FgtError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| FgtError::Parse(e.to_string()))
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| FgtError::Parse(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| FgtError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FgtError::Parse(e.to_string()))
}

fn resolve_out(common: &Common) -> Option<PathBuf> {
    let out = common.out.as_ref()?;
    Some(match &common.output_dir {
        Some(dir) if out.is_relative() => dir.join(out),
        _ => out.clone(),
    })
}

fn write_report(common: &Common, json: &str) -> Result<()> {
    let Some(path) = resolve_out(common) else {
        return Ok(());
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(&path, json).map_err(io_err(&path))
}

// ---------------------------------------------------------------------------
// estimate

#[derive(Serialize)]
struct EstimateConfig<'a> {
    input: &'a Path,
    header: bool,
    column: usize,
    delimiter: String,
    strict: bool,
    z: f64,
    alpha: f64,
    estimator: EstimatorId,
    kernel: &'a str,
    bandwidth_rule: BandwidthRule,
    bandwidth: Option<f64>,
    adaptive_sensitivity: Option<f64>,
    pilot_bandwidth: Option<f64>,
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    config: EstimateConfig<'a>,
    estimate: &'a FgtEstimate,
    row_errors: Vec<String>,
}

fn cmd_estimate(args: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let params = FgtParams::new(args.z, args.alpha)?;
    let kernel = kernel_by_name(&args.common.kernel)?;
    let options = LoadOptions {
        header: args.header,
        column: args.column,
        delimiter: args.delimiter,
        strict: args.strict,
    };
    let file = read_income_file(&args.input, &options)?;
    let row_errors: Vec<String> = file.row_errors.iter().map(|e| e.message.clone()).collect();
    let sample = file.into_sample()?;

    let kernel_based = args.estimator.is_kernel();
    let h = if kernel_based {
        Some(args.bandwidth.resolve(sample.len())?)
    } else {
        None
    };
    let adaptive = args.estimator == EstimatorId::Adaptive;
    let pilot = adaptive.then(|| args.pilot_bandwidth.or(h)).flatten();
    let estimate = match args.estimator {
        EstimatorId::Empirical => empirical_fgt(&sample, &params),
        EstimatorId::Classical => classical_kernel_fgt(&sample, &kernel, h.unwrap_or_default(), &params)?,
        EstimatorId::BiasReduced => bias_reduced_fgt(&sample, &kernel, h.unwrap_or_default(), &params)?,
        EstimatorId::Adaptive => {
            let h = h.unwrap_or_default();
            let factors = local_bandwidth_factors(&sample, &kernel, pilot.unwrap_or(h), args.sensitivity)?;
            adaptive_kernel_fgt(&sample, &kernel, h, &factors, &params)?
        }
    };

    let report = EstimateReport {
        config: EstimateConfig {
            input: &args.input,
            header: args.header,
            column: args.column,
            delimiter: format!("{:?}", args.delimiter).to_lowercase(),
            strict: args.strict,
            z: args.z,
            alpha: args.alpha,
            estimator: args.estimator,
            kernel: kernel.name(),
            bandwidth_rule: args.bandwidth,
            bandwidth: h,
            adaptive_sensitivity: adaptive.then_some(args.sensitivity),
            pilot_bandwidth: pilot,
        },
        estimate: &estimate,
        row_errors,
    };
    let json = to_json(&report)?;
    write_report(&args.common, &json)?;
    for e in &report.row_errors {
        eprintln!("warning: {e}");
    }

    let rendered = match args.common.format {
        Format::Json => json,
        Format::Csv => csv_string(
            &["estimator", "value", "bandwidth", "grid_cells", "n", "warnings"],
            &[vec![
                estimate.estimator.to_string(),
                estimate.value.to_string(),
                estimate.bandwidth.map(|h| h.to_string()).unwrap_or_default(),
                estimate.grid_cells.map(|m| m.to_string()).unwrap_or_default(),
                estimate.n.to_string(),
                estimate.warnings.join("; "),
            ]],
        )?,
        Format::Text => {
            let mut s = format!("{} estimate: {:.6}\n", estimate.estimator, estimate.value);
            s += &format!("n: {}\n", estimate.n);
            if let Some(h) = estimate.bandwidth {
                s += &format!("h: {h:.7} ({})\n", args.bandwidth);
            }
            if let Some(m) = estimate.grid_cells {
                s += &format!("[z/h]: {m}\n");
            }
            for w in &estimate.warnings {
                s += &format!("warning: {w}\n");
            }
            s
        }
    };
    emit(out, &rendered)
}

// ---------------------------------------------------------------------------
// simulate

fn simulation_config(args: &SimulateArgs) -> Result<SimulationConfig> {
    let mut config = match &args.config {
        Some(path) => SimulationConfig::from_path(path)?,
        None => SimulationConfig::paper_preset(args.common.seed.unwrap_or(1)),
    };
    if let Some(seed) = args.common.seed {
        config.base_seed = seed;
    }
    if args.common.kernel != "gaussian" || args.config.is_none() {
        config.kernel = args.common.kernel.clone();
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(r) = args.reps {
        config.replications = r;
    }
    if let Some(z) = &args.z_grid {
        config.z_grid = z.clone();
    }
    if let Some(a) = &args.alpha_grid {
        config.alpha_grid = a.clone();
    }
    if let Some(e) = &args.estimators {
        config.estimators = e.clone();
    }
    if let Some(b) = args.bandwidth {
        config.bandwidth_rule = b;
    }
    if let Some(s) = args.sensitivity {
        config.adaptive_sensitivity = s;
    }
    if let Some(d) = args.dist.spec() {
        config.distribution = d;
    }
    config.validate()?;
    Ok(config)
}

fn cells_text(report: &SimulationReport) -> String {
    let mut s = String::new();
    for note in &report.notes {
        s += &format!("# {note}\n");
    }
    s += &format!(
        "{:>6} {:>6} {:>14} {:>14} {:>14} {:>14} {:>14}\n",
        "z", "alpha", "estimator", "true", "mean", "mse", "variance"
    );
    for c in &report.cells {
        let truth = report.true_value(c.z, c.alpha).unwrap_or(f64::NAN);
        s += &format!(
            "{:>6} {:>6} {:>14} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}\n",
            c.z,
            c.alpha,
            c.estimator.as_str(),
            truth,
            c.mean,
            c.mse,
            c.variance
        );
    }
    if !report.failures.is_empty() {
        s += &format!("{} failed cell evaluations\n", report.failures.len());
    }
    s
}

fn cells_csv(report: &SimulationReport) -> Result<String> {
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                c.z.to_string(),
                c.alpha.to_string(),
                c.estimator.to_string(),
                report.true_value(c.z, c.alpha).unwrap_or(f64::NAN).to_string(),
                c.mean.to_string(),
                c.mse.to_string(),
                c.variance.to_string(),
                c.replications.to_string(),
            ]
        })
        .collect();
    csv_string(
        &[
            "z",
            "alpha",
            "estimator",
            "true",
            "mean",
            "mse",
            "variance",
            "replications",
        ],
        &rows,
    )
}

fn cmd_simulate(args: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let config = simulation_config(&args)?;
    let report = run_simulation_with_threads(&config, args.common.threads)?;
    let json = report.to_json_document()? + "\n";
    write_report(&args.common, &json)?;
    let table_ready = [EstimatorId::BiasReduced, EstimatorId::Classical, EstimatorId::Adaptive]
        .iter()
        .all(|e| config.estimators.contains(e));
    let rendered = match args.common.format {
        Format::Json => json,
        Format::Text if table_ready => PaperTable::from_report(report)?.render_text(),
        Format::Csv if table_ready => PaperTable::from_report(report)?.render_csv()?,
        Format::Text => cells_text(&report),
        Format::Csv => cells_csv(&report)?,
    };
    emit(out, &rendered)
}

// ---------------------------------------------------------------------------
// efficiency

#[derive(Serialize)]
struct EfficiencyReport {
    config: EfficiencyConfig,
    p_z_alpha: f64,
    p_z_2alpha: f64,
    square_integral: f64,
    asymptotic_variance: f64,
    efficiency: Option<f64>,
    warnings: Vec<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct EfficiencyConfig {
    distribution: DistributionSpec,
    z: f64,
    alpha: f64,
    kernel: String,
    tol: f64,
}

fn cmd_efficiency(args: EfficiencyArgs, out: &mut dyn Write) -> Result<()> {
    let params = FgtParams::new(args.z, args.alpha)?;
    let kernel = kernel_by_name(&args.common.kernel)?;
    let spec = args.dist.spec().unwrap_or(DistributionSpec::Uniform);
    let dist = spec.build()?;
    let p = true_fgt(&dist, params.z(), params.alpha(), args.tol)?;
    let p2 = true_fgt(&dist, params.z(), 2.0 * params.alpha(), args.tol)?;
    let variance = asymptotic_variance(&kernel, p, p2);
    let e = efficiency(&kernel, p, p2);
    let report = EfficiencyReport {
        config: EfficiencyConfig {
            distribution: spec,
            z: args.z,
            alpha: args.alpha,
            kernel: kernel.name().to_string(),
            tol: args.tol,
        },
        p_z_alpha: p,
        p_z_2alpha: p2,
        square_integral: kernel.square_integral(),
        asymptotic_variance: variance.value,
        efficiency: e.as_ref().ok().copied(),
        warnings: variance.warnings.clone(),
        error: e.as_ref().err().map(ToString::to_string),
    };
    let json = to_json(&report)?;
    write_report(&args.common, &json)?;

    let rendered = match args.common.format {
        Format::Json => json,
        Format::Csv => csv_string(
            &[
                "z",
                "alpha",
                "p_z_alpha",
                "p_z_2alpha",
                "asymptotic_variance",
                "efficiency",
            ],
            &[vec![
                args.z.to_string(),
                args.alpha.to_string(),
                p.to_string(),
                p2.to_string(),
                variance.value.to_string(),
                report.efficiency.map(|e| e.to_string()).unwrap_or_default(),
            ]],
        )?,
        Format::Text => {
            let mut s = format!("distribution: {}\n", spec.describe());
            s += &format!("P(z, alpha)   = {p:.10}\n");
            s += &format!("P(z, 2 alpha) = {p2:.10}\n");
            s += &format!("R(K)          = {:.10}\n", kernel.square_integral());
            s += &format!("asymptotic variance R(K)·P(z,2α) - P(z,α)² = {:.7}\n", variance.value);
            if let Some(e) = report.efficiency {
                s += &format!("efficiency e(z, alpha) = {e:.7}\n");
            }
            for w in &variance.warnings {
                s += &format!("warning: {w}\n");
            }
            s
        }
    };
    emit(out, &rendered)?;
    e.map(|_| ())
}

// ---------------------------------------------------------------------------
// kernel-info

fn cmd_kernel_info(args: KernelInfoArgs, out: &mut dyn Write) -> Result<()> {
    let kernel = kernel_by_name(&args.common.kernel)?;
    let report = verify_hypotheses(&kernel, args.tol)?;
    let json = to_json(&report)?;
    write_report(&args.common, &json)?;
    let rendered = match args.common.format {
        Format::Json => json,
        Format::Csv => csv_string(
            &["hypothesis", "function", "status", "measured", "threshold", "detail"],
            &report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        format!("{:?}", c.hypothesis),
                        format!("{:?}", c.function).to_lowercase(),
                        format!("{:?}", c.status).to_lowercase(),
                        c.measured.to_string(),
                        c.threshold.to_string(),
                        c.detail.clone(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Text => {
            let mut s = format!("kernel: {}\n", kernel.name());
            s += &format!("second moment mu2 = {}\n", kernel.second_moment());
            s += &format!("square integral R(K) = {:.10}\n", kernel.square_integral());
            s += &format!("effective support radius = {}\n", kernel.effective_support_radius());
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Informational => "info",
                };
                let name = match c.hypothesis {
                    Hypothesis::StoredMoments => "moments".to_string(),
                    h => format!("{h:?}"),
                };
                s += &format!(
                    "{name:<8} {:<18} {status:<5} {}\n",
                    format!("{:?}", c.function),
                    c.detail
                );
            }
            s
        }
    };
    emit(out, &rendered)?;
    if report.all_checkable_pass() {
        Ok(())
    } else {
        Err(FgtError::InvalidArgument(format!(
            "kernel `{}` fails {} hypothesis checks",
            kernel.name(),
            report.failures().count()
        )))
    }
}
