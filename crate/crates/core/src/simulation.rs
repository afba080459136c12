//! Monte Carlo harness: replicated sampling, every requested estimator on a
//! `(z, α)` grid, and per-cell mean / mse / variance against the exact index.
//!
//! Statistics use the `R` denominator:
//!
//! ```text
//! P̄ = (1/R) Σ Pᵣ,   mse = (1/R) Σ (Pᵣ - P)²,   σ² = (1/R) Σ (Pᵣ - P̄)²
//! ```
//!
//! so `mse = σ² + (P̄ - P)²` holds per cell up to rounding.
//!
//! Replication `r` draws its sample with seed [`replication_seed`]`(base_seed, r)`.
//! Replications may run on any number of threads; results are merged in
//! replication order, so the report body is bit-identical for a given config.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    draw_sample, replication_seed, true_fgt, DistributionSpec, IncomeDistribution, GENERATOR_ID, SEED_SCHEME_ID,
};
use crate::error::{FgtError, Result};
use crate::estimators::{
    empirical_fgt, local_bandwidth_factors, AdaptiveGrid, BandwidthRule, EstimatorId, FgtParams, KernelGrid,
};
use crate::kernels::{kernel_by_name, Kernel};
use crate::sum::NeumaierSum;

pub const DEFAULT_SENSITIVITY: f64 = 0.5;

/// Header note attached to every report.
pub const REPRODUCIBILITY_NOTE: &str = "Published reference table values are not reproducible exactly (unknown \
generator, seeds and Pareto construction); compare orderings and magnitudes, not digits.";

const MSE_NOTE: &str = "mse = variance + bias² holds in every cell of this report; published mse values near 2 \
for alpha in {1, 2} cannot arise for an index bounded in [0, 1] and are not targeted.";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    /// Replication `r` uses `replication_seed(base_seed, r)`.
    #[default]
    PerReplication,
    /// Every replication reuses `base_seed` (degenerate; for diagnostics).
    Shared,
}

fn default_rule() -> BandwidthRule {
    BandwidthRule::Nlogn
}
fn default_sensitivity() -> f64 {
    DEFAULT_SENSITIVITY
}
fn default_kernel() -> String {
    "gaussian".into()
}
fn default_tol() -> f64 {
    crate::distributions::DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub distribution: DistributionSpec,
    pub n: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub z_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub estimators: Vec<EstimatorId>,
    #[serde(default = "default_rule")]
    pub bandwidth_rule: BandwidthRule,
    #[serde(default = "default_sensitivity")]
    pub adaptive_sensitivity: f64,
    /// Pilot bandwidth for the adaptive factors; the main bandwidth when absent.
    #[serde(default)]
    pub pilot_bandwidth: Option<f64>,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default)]
    pub seed_mode: SeedMode,
    #[serde(default = "default_tol")]
    pub true_value_tol: f64,
}

impl SimulationConfig {
    /// The reference design: n = 1000, R = 50, Pareto(0.02, 0.2) on [0.02, 1],
    /// z ∈ {0.1, …, 0.7}, α ∈ {0, 1, 2}, Gaussian kernel, h = (n ln n)^(-1/2).
    pub fn paper_preset(base_seed: u64) -> Self {
        Self {
            distribution: DistributionSpec::Pareto {
                x0: 0.02,
                beta: 0.2,
                upper: 1.0,
            },
            n: 1000,
            replications: 50,
            base_seed,
            z_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
            alpha_grid: vec![0.0, 1.0, 2.0],
            estimators: vec![EstimatorId::BiasReduced, EstimatorId::Classical, EstimatorId::Adaptive],
            bandwidth_rule: BandwidthRule::Nlogn,
            adaptive_sensitivity: DEFAULT_SENSITIVITY,
            pilot_bandwidth: None,
            kernel: default_kernel(),
            seed_mode: SeedMode::PerReplication,
            true_value_tol: default_tol(),
        }
    }

    /// Read a JSON (`.json`) or TOML (anything else) config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| FgtError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let config: Self = if is_json {
            serde_json::from_str(&text).map_err(|e| FgtError::Parse(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| FgtError::Parse(format!("{}: {e}", path.display())))?
        };
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FgtError::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("sample size n = {} must be >= 2", self.n));
        }
        if self.replications < 2 {
            return bad(format!("replications R = {} must be >= 2", self.replications));
        }
        if self.z_grid.is_empty() || self.alpha_grid.is_empty() {
            return bad("z and alpha grids must be nonempty".into());
        }
        if self.estimators.is_empty() {
            return bad("at least one estimator is required".into());
        }
        let mut seen = self.estimators.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.estimators.len() {
            return bad("estimators must not repeat".into());
        }
        let dist = self
            .distribution
            .build()
            .map_err(|e| FgtError::InvalidConfig(e.to_string()))?;
        let (_, upper) = dist.support();
        if let Some(z) = self.z_grid.iter().find(|z| !(**z > 0.0 && **z <= upper)) {
            return bad(format!("poverty line {z} must lie in (0, {upper}]"));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return bad(format!("poverty aversion {a} must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.adaptive_sensitivity) {
            return bad(format!(
                "adaptive sensitivity {} must lie in [0, 1]",
                self.adaptive_sensitivity
            ));
        }
        if let Some(p) = self.pilot_bandwidth {
            if !(p > 0.0 && p.is_finite()) {
                return bad(format!("pilot bandwidth {p} must be finite and > 0"));
            }
        }
        if self.true_value_tol.is_nan() || self.true_value_tol <= 0.0 {
            return bad(format!("true-value tolerance {} must be > 0", self.true_value_tol));
        }
        self.bandwidth_rule
            .resolve(self.n)
            .map_err(|e| FgtError::InvalidConfig(e.to_string()))?;
        kernel_by_name(&self.kernel).map_err(|e| FgtError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    fn seed_for(&self, r: usize) -> u64 {
        match self.seed_mode {
            SeedMode::PerReplication => replication_seed(self.base_seed, r as u64),
            SeedMode::Shared => self.base_seed,
        }
    }

    fn cell_keys(&self) -> Vec<(f64, f64, EstimatorId)> {
        let mut keys = Vec::with_capacity(self.z_grid.len() * self.alpha_grid.len() * self.estimators.len());
        for &z in &self.z_grid {
            for &alpha in &self.alpha_grid {
                for &e in &self.estimators {
                    keys.push((z, alpha, e));
                }
            }
        }
        keys
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrueValue {
    pub z: f64,
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellStats {
    pub z: f64,
    pub alpha: f64,
    pub estimator: EstimatorId,
    pub mean: f64,
    pub mse: f64,
    pub variance: f64,
    /// Replications that produced a value.
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub z: f64,
    pub alpha: f64,
    pub estimator: EstimatorId,
    pub replication: usize,
    pub message: String,
}

/// Wall-clock metadata, kept out of the deterministic report body.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunMetadata {
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub finished_unix_seconds: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub distribution: String,
    pub kernel: String,
    pub bandwidth: f64,
    pub pilot_bandwidth: Option<f64>,
    pub generator: String,
    pub seed_scheme: String,
    pub notes: Vec<String>,
    pub true_values: Vec<TrueValue>,
    pub cells: Vec<CellStats>,
    pub failures: Vec<CellFailure>,
    #[serde(skip)]
    pub metadata: RunMetadata,
}

impl SimulationReport {
    pub fn cell(&self, z: f64, alpha: f64, estimator: EstimatorId) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.z == z && c.alpha == alpha && c.estimator == estimator)
    }

    pub fn true_value(&self, z: f64, alpha: f64) -> Option<f64> {
        self.true_values
            .iter()
            .find(|t| t.z == z && t.alpha == alpha)
            .map(|t| t.value)
    }

    /// Deterministic JSON body (no timing metadata).
    pub fn to_json_body(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| FgtError::Parse(e.to_string()))
    }

    /// Full JSON document: `{"report": <body>, "metadata": <timing>}`.
    pub fn to_json_document(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Document<'a> {
            report: &'a SimulationReport,
            metadata: &'a RunMetadata,
        }
        serde_json::to_string_pretty(&Document {
            report: self,
            metadata: &self.metadata,
        })
        .map_err(|e| FgtError::Parse(e.to_string()))
    }
}

struct Context {
    dist: IncomeDistribution,
    kernel: Kernel,
    h: f64,
    pilot_h: f64,
    max_z: f64,
}

type CellOutcome = std::result::Result<f64, String>;

fn replicate(config: &SimulationConfig, ctx: &Context, keys: &[(f64, f64, EstimatorId)], r: usize) -> Vec<CellOutcome> {
    let sample = match draw_sample(&ctx.dist, config.n, config.seed_for(r)) {
        Ok(s) => s,
        Err(e) => return vec![Err(e.to_string()); keys.len()],
    };
    let wants = |id| config.estimators.contains(&id);
    let fixed_grid = (wants(EstimatorId::Classical) || wants(EstimatorId::BiasReduced))
        .then(|| KernelGrid::new(&sample, &ctx.kernel, ctx.h, ctx.max_z).map_err(|e| e.to_string()));
    let adaptive_grid = wants(EstimatorId::Adaptive).then(|| {
        local_bandwidth_factors(&sample, &ctx.kernel, ctx.pilot_h, config.adaptive_sensitivity)
            .and_then(|f| AdaptiveGrid::new(&sample, &ctx.kernel, ctx.h, &f, ctx.max_z))
            .map_err(|e| e.to_string())
    });

    keys.iter()
        .map(|&(z, alpha, estimator)| {
            let params = FgtParams::new(z, alpha).map_err(|e| e.to_string())?;
            let fixed = || {
                fixed_grid
                    .as_ref()
                    .expect("fixed grid requested")
                    .as_ref()
                    .map_err(Clone::clone)
            };
            match estimator {
                EstimatorId::Empirical => Ok(empirical_fgt(&sample, &params).value),
                EstimatorId::Classical => fixed()?.classical(&params).map_err(|e| e.to_string()),
                EstimatorId::BiasReduced => fixed()?.bias_reduced(&params).map_err(|e| e.to_string()),
                EstimatorId::Adaptive => adaptive_grid
                    .as_ref()
                    .expect("adaptive grid requested")
                    .as_ref()
                    .map_err(Clone::clone)?
                    .estimate(&params)
                    .map_err(|e| e.to_string()),
            }
        })
        .collect()
}

/// Run the configured experiment on the global rayon pool.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    run_simulation_with_threads(config, None)
}

/// Run on a dedicated pool of `threads` workers (`None`: global pool).
/// The report body does not depend on the thread count.
pub fn run_simulation_with_threads(config: &SimulationConfig, threads: Option<usize>) -> Result<SimulationReport> {
    config.validate()?;
    let started = Instant::now();
    let dist = config.distribution.build()?;
    let kernel = kernel_by_name(&config.kernel)?;
    let h = config.bandwidth_rule.resolve(config.n)?;
    let pilot_h = config.pilot_bandwidth.unwrap_or(h);
    let max_z = config.z_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ctx = Context {
        dist,
        kernel,
        h,
        pilot_h,
        max_z,
    };

    let mut true_values = Vec::new();
    for &z in &config.z_grid {
        for &alpha in &config.alpha_grid {
            let value = true_fgt(&ctx.dist, z, alpha, config.true_value_tol)?;
            true_values.push(TrueValue { z, alpha, value });
        }
    }

    let keys = config.cell_keys();
    let run = || -> Vec<Vec<CellOutcome>> {
        (0..config.replications)
            .into_par_iter()
            .map(|r| replicate(config, &ctx, &keys, r))
            .collect()
    };
    let (outcomes, thread_count) = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| FgtError::InvalidConfig(format!("cannot build a {t}-thread pool: {e}")))?;
            (pool.install(run), t)
        }
        None => (run(), rayon::current_num_threads()),
    };

    let mut cells = Vec::with_capacity(keys.len());
    let mut failures = Vec::new();
    for (k, &(z, alpha, estimator)) in keys.iter().enumerate() {
        let truth = true_values
            .iter()
            .find(|t| t.z == z && t.alpha == alpha)
            .map(|t| t.value)
            .expect("true value computed for every grid point");
        let mut values = Vec::with_capacity(config.replications);
        for (r, rep) in outcomes.iter().enumerate() {
            match &rep[k] {
                Ok(v) => values.push(*v),
                Err(message) => failures.push(CellFailure {
                    z,
                    alpha,
                    estimator,
                    replication: r,
                    message: message.clone(),
                }),
            }
        }
        if values.is_empty() {
            continue;
        }
        let count = values.len() as f64;
        let mean = values.iter().copied().collect::<NeumaierSum>().total() / count;
        let mse = values
            .iter()
            .map(|v| (v - truth).powi(2))
            .collect::<NeumaierSum>()
            .total()
            / count;
        let variance = values
            .iter()
            .map(|v| (v - mean).powi(2))
            .collect::<NeumaierSum>()
            .total()
            / count;
        cells.push(CellStats {
            z,
            alpha,
            estimator,
            mean,
            mse,
            variance,
            replications: values.len(),
        });
    }

    let mut notes = vec![REPRODUCIBILITY_NOTE.to_string(), MSE_NOTE.to_string()];
    notes.push(format!("distribution: {}", config.distribution.describe()));
    if let Some(note) = config.bandwidth_rule.regime_note(config.n) {
        notes.push(note);
    }
    if config.estimators.contains(&EstimatorId::Adaptive) {
        notes.push(format!(
            "adaptive factors: λⱼ = (f̂(Xⱼ)/g)^(-{}), g the geometric mean of the pilot density at the sample \
             points, pilot bandwidth {pilot_h}",
            config.adaptive_sensitivity
        ));
    }
    if config.seed_mode == SeedMode::Shared {
        notes.push("seed mode `shared`: every replication reuses the base seed".into());
    }
    for &alpha in &config.alpha_grid {
        if alpha > 0.0 && alpha < 1.0 && config.estimators.iter().any(EstimatorId::is_kernel) {
            notes.push(format!(
                "alpha outside α=0 or α≥1 theory (alpha = {alpha}) for the kernel estimators"
            ));
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    Ok(SimulationReport {
        config: config.clone(),
        distribution: config.distribution.describe(),
        kernel: ctx.kernel.name().to_string(),
        bandwidth: h,
        pilot_bandwidth: config.estimators.contains(&EstimatorId::Adaptive).then_some(pilot_h),
        generator: GENERATOR_ID.to_string(),
        seed_scheme: match config.seed_mode {
            SeedMode::PerReplication => SEED_SCHEME_ID.to_string(),
            SeedMode::Shared => "shared: base_seed for every replication".to_string(),
        },
        notes,
        true_values,
        cells,
        failures,
        metadata: RunMetadata {
            wall_clock_seconds: elapsed,
            threads: thread_count,
            finished_unix_seconds: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    })
}

// ---------------------------------------------------------------------------
// Reference-table view

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBlock {
    pub alpha: f64,
    pub rows: Vec<TableRow>,
    /// Cells in this block where mse(bias-reduced) < mse(classical).
    pub bias_reduced_wins: usize,
}

/// mse and variance rows per α for the bias-reduced (1), classical (2) and
/// adaptive (3) estimators, one column per poverty line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperTable {
    pub z_grid: Vec<f64>,
    pub blocks: Vec<AlphaBlock>,
    pub report: SimulationReport,
}

const TABLE_ESTIMATORS: [EstimatorId; 3] = [EstimatorId::BiasReduced, EstimatorId::Classical, EstimatorId::Adaptive];

/// Run the simulation and arrange it as the reference mse/variance table.
pub fn paper_table(config: &SimulationConfig) -> Result<PaperTable> {
    if config.estimators.is_empty() {
        return Err(FgtError::InvalidConfig("at least one estimator is required".into()));
    }
    if let Some(missing) = TABLE_ESTIMATORS.iter().find(|e| !config.estimators.contains(e)) {
        return Err(FgtError::InvalidConfig(format!(
            "the table needs the bias_reduced, classical and adaptive estimators; `{missing}` is missing"
        )));
    }
    PaperTable::from_report(run_simulation(config)?)
}

impl PaperTable {
    pub fn from_report(report: SimulationReport) -> Result<Self> {
        let config = &report.config;
        let mut blocks = Vec::new();
        for &alpha in &config.alpha_grid {
            let mut rows = Vec::new();
            let stat = |e: EstimatorId, z: f64, pick: fn(&CellStats) -> f64| -> Result<f64> {
                report.cell(z, alpha, e).map(pick).ok_or_else(|| {
                    FgtError::InvalidConfig(format!("no statistics for {e} at z = {z}, alpha = {alpha}"))
                })
            };
            for (k, e) in TABLE_ESTIMATORS.iter().enumerate() {
                rows.push(TableRow {
                    label: format!("mse_{} ({e})", k + 1),
                    values: config
                        .z_grid
                        .iter()
                        .map(|&z| stat(*e, z, |c| c.mse))
                        .collect::<Result<_>>()?,
                });
            }
            for (k, e) in TABLE_ESTIMATORS.iter().enumerate() {
                rows.push(TableRow {
                    label: format!("var_{} ({e})", k + 1),
                    values: config
                        .z_grid
                        .iter()
                        .map(|&z| stat(*e, z, |c| c.variance))
                        .collect::<Result<_>>()?,
                });
            }
            let bias_reduced_wins = rows[0]
                .values
                .iter()
                .zip(&rows[1].values)
                .filter(|(b, c)| b < c)
                .count();
            blocks.push(AlphaBlock {
                alpha,
                rows,
                bias_reduced_wins,
            });
        }
        Ok(Self {
            z_grid: config.z_grid.clone(),
            blocks,
            report,
        })
    }

    /// Total cells where mse(bias-reduced) < mse(classical).
    pub fn bias_reduced_wins(&self) -> usize {
        self.blocks.iter().map(|b| b.bias_reduced_wins).sum()
    }

    pub fn cell_count(&self) -> usize {
        self.blocks.len() * self.z_grid.len()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let r = &self.report;
        let _ = writeln!(out, "# {REPRODUCIBILITY_NOTE}");
        let _ = writeln!(
            out,
            "# {}; n = {}, R = {}, h = {:.7}, kernel = {}, base seed = {}",
            r.distribution, r.config.n, r.config.replications, r.bandwidth, r.kernel, r.config.base_seed
        );
        let _ = write!(out, "{:<26}", "z");
        for z in &self.z_grid {
            let _ = write!(out, "{z:>13}");
        }
        let _ = writeln!(out, "{:>12}", "br<cl");
        for block in &self.blocks {
            let _ = writeln!(out, "alpha = {}", block.alpha);
            for (k, row) in block.rows.iter().enumerate() {
                let _ = write!(out, "{:<26}", row.label);
                for v in &row.values {
                    let _ = write!(out, "{v:>13.6e}");
                }
                if k == 0 {
                    let _ = write!(
                        out,
                        "{:>12}",
                        format!("{}/{}", block.bias_reduced_wins, self.z_grid.len())
                    );
                }
                let _ = writeln!(out);
            }
        }
        let _ = writeln!(
            out,
            "mse(bias_reduced) < mse(classical) in {}/{} cells",
            self.bias_reduced_wins(),
            self.cell_count()
        );
        out
    }

    pub fn render_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["alpha".to_string(), "statistic".to_string()];
        header.extend(self.z_grid.iter().map(|z| format!("z={z}")));
        header.push("bias_reduced_wins".into());
        w.write_record(&header).map_err(|e| FgtError::Parse(e.to_string()))?;
        for block in &self.blocks {
            for (k, row) in block.rows.iter().enumerate() {
                let mut record = vec![block.alpha.to_string(), row.label.clone()];
                record.extend(row.values.iter().map(|v| v.to_string()));
                record.push(if k == 0 {
                    block.bias_reduced_wins.to_string()
                } else {
                    String::new()
                });
                w.write_record(&record).map_err(|e| FgtError::Parse(e.to_string()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| FgtError::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| FgtError::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(estimators: Vec<EstimatorId>) -> SimulationConfig {
        SimulationConfig {
            distribution: DistributionSpec::Uniform,
            n: 200,
            replications: 8,
            base_seed: 3,
            z_grid: vec![0.3, 0.5],
            alpha_grid: vec![0.0, 1.0],
            estimators,
            ..SimulationConfig::paper_preset(3)
        }
    }

    #[test]
    fn validation_errors() {
        let mut c = small(vec![EstimatorId::Empirical]);
        c.replications = 1;
        assert!(matches!(c.validate(), Err(FgtError::InvalidConfig(_))));
        let mut c = small(vec![]);
        assert!(c.validate().is_err());
        c.estimators = vec![EstimatorId::Empirical];
        c.z_grid = vec![1.5];
        assert!(c.validate().is_err());
        c.z_grid = vec![0.5];
        c.kernel = "box".into();
        assert!(c.validate().is_err());
        assert!(paper_table(&small(vec![])).is_err());
        assert!(paper_table(&small(vec![EstimatorId::Classical])).is_err());
    }

    #[test]
    fn bias_variance_identity_per_cell() {
        let report = run_simulation(&small(EstimatorId::ALL.to_vec())).unwrap();
        assert_eq!(report.cells.len(), 2 * 2 * 4);
        assert!(report.failures.is_empty());
        for c in &report.cells {
            let truth = report.true_value(c.z, c.alpha).unwrap();
            assert!((c.mse - (c.variance + (c.mean - truth).powi(2))).abs() < 1e-10);
            assert!(c.mse >= c.variance - 1e-15);
            assert_eq!(c.replications, 8);
        }
    }

    #[test]
    fn shared_seed_has_zero_variance() {
        let mut c = small(vec![EstimatorId::Empirical]);
        c.replications = 2;
        c.seed_mode = SeedMode::Shared;
        let report = run_simulation(&c).unwrap();
        for cell in &report.cells {
            assert_eq!(cell.variance, 0.0);
            let truth = report.true_value(cell.z, cell.alpha).unwrap();
            assert_eq!(cell.mse, (cell.mean - truth).powi(2));
        }
    }

    #[test]
    fn thread_count_does_not_change_body() {
        let c = small(EstimatorId::ALL.to_vec());
        let one = run_simulation_with_threads(&c, Some(1)).unwrap();
        let four = run_simulation_with_threads(&c, Some(4)).unwrap();
        assert_eq!(one.to_json_body().unwrap(), four.to_json_body().unwrap());
        assert!(one.to_json_document().unwrap().contains("wall_clock_seconds"));
        assert!(!one.to_json_body().unwrap().contains("wall_clock_seconds"));
    }

    #[test]
    fn table_shape() {
        let mut c = small(vec![
            EstimatorId::BiasReduced,
            EstimatorId::Classical,
            EstimatorId::Adaptive,
        ]);
        c.replications = 3;
        let t = paper_table(&c).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert!(t
            .blocks
            .iter()
            .all(|b| b.rows.len() == 6 && b.rows.iter().all(|r| r.values.len() == 2)));
        let text = t.render_text();
        assert!(text.contains("mse_1 (bias_reduced)"));
        let csv = t.render_csv().unwrap();
        assert_eq!(csv.lines().count(), 1 + 2 * 6);
    }

    #[test]
    fn config_round_trips_through_toml_and_json() {
        let c = SimulationConfig {
            bandwidth_rule: BandwidthRule::Fixed(0.02),
            ..SimulationConfig::paper_preset(9)
        };
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("c.toml");
        std::fs::write(&toml_path, toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(SimulationConfig::from_path(&toml_path).unwrap(), c);
        let json_path = dir.path().join("c.json");
        std::fs::write(&json_path, serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(SimulationConfig::from_path(&json_path).unwrap(), c);
    }
}
