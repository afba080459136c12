//! FGT index estimators.
//!
//! Four estimators of `P(z, α)` are provided:
//!
//! * [`empirical_fgt`]: `(1/n) Σ (1 - Xᵢ/z)₊^α`.
//! * [`classical_kernel_fgt`]: a Riemann sum of the Parzen–Rosenblatt density
//!   on the grid `{ih : 0 <= i <= [z/h]}`,
//!   `(1/n) Σⱼ Σᵢ ((z-ih)/z)^α K((ih-Xⱼ)/h)`.
//! * [`adaptive_kernel_fgt`]: the same with a per-observation bandwidth `hλⱼ`
//!   and a per-observation grid.
//! * [`bias_reduced_fgt`]: the grid sum of the bias-corrected density,
//!   `(1/n) Σⱼ Σᵢ ((z-ih)/z)^α [K((ih-Xⱼ)/h) - (h²/2) μ₂ K''((ih-Xⱼ)/h)]`.
//!
//! The grid index starts at `i = 0` with weight one. Kernel grid weights use
//! `0⁰ = 1`, so for `α = 0` a grid point landing exactly on `z` is counted;
//! the empirical estimator instead uses the headcount indicator `Xᵢ < z`.
//!
//! All sums are Neumaier-compensated.

mod asymptotics;
mod bandwidth;

pub use asymptotics::{asymptotic_variance, efficiency, AsymptoticVariance};
pub use bandwidth::{default_bandwidth, lil_bandwidth, regime_ratio, BandwidthRule};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::IncomeSample;
use crate::error::{check_bandwidth, FgtError, Result};
use crate::kernels::{bias_corrected_density, classical_density, Kernel};
use crate::quadrature::integrate;
use crate::sum::NeumaierSum;

/// Largest grid the kernel estimators will build.
pub const MAX_GRID_CELLS: usize = 100_000_000;

/// Relative distance from an integer below which `z/h` is snapped to it.
const GRID_SNAP: f64 = 1e-12;

/// Floor applied to pilot density values before taking powers.
const PILOT_FLOOR: f64 = 1e-12;

/// Poverty line and aversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgtParams {
    z: f64,
    alpha: f64,
}

impl FgtParams {
    pub fn new(z: f64, alpha: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(FgtError::InvalidParameter {
                name: "z",
                value: z,
                reason: "poverty line must be finite and > 0".into(),
            });
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(FgtError::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "poverty aversion must be finite and >= 0".into(),
            });
        }
        Ok(Self { z, alpha })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True iff `α = 0` or `α >= 1`, the range the kernel estimators are
    /// known to be consistent on.
    pub fn theory_covered(&self) -> bool {
        self.alpha == 0.0 || self.alpha >= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Empirical,
    Classical,
    Adaptive,
    BiasReduced,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 4] = [
        EstimatorId::Empirical,
        EstimatorId::Classical,
        EstimatorId::Adaptive,
        EstimatorId::BiasReduced,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::Empirical => "empirical",
            EstimatorId::Classical => "classical",
            EstimatorId::Adaptive => "adaptive",
            EstimatorId::BiasReduced => "bias_reduced",
        }
    }

    pub fn is_kernel(&self) -> bool {
        !matches!(self, EstimatorId::Empirical)
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = FgtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "empirical" => Ok(EstimatorId::Empirical),
            "classical" => Ok(EstimatorId::Classical),
            "adaptive" => Ok(EstimatorId::Adaptive),
            "bias_reduced" | "bias_reduction" => Ok(EstimatorId::BiasReduced),
            _ => Err(FgtError::Parse(format!(
                "unknown estimator `{s}` (expected empirical, classical, adaptive or bias-reduced)"
            ))),
        }
    }
}

/// Estimator output with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FgtEstimate {
    pub value: f64,
    pub estimator: EstimatorId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    /// `[z/h]`, the index of the last grid point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_cells: Option<usize>,
    pub n: usize,
    pub warnings: Vec<String>,
}

/// Per-observation bandwidth multipliers `λⱼ` for the adaptive estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalFactors {
    lambdas: Vec<f64>,
    pilot_bandwidth: f64,
    sensitivity: f64,
}

impl LocalFactors {
    pub fn new(lambdas: Vec<f64>, pilot_bandwidth: f64, sensitivity: f64) -> Result<Self> {
        if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(FgtError::InvalidArgument(format!(
                "local bandwidth factors must be finite and > 0, found {l}"
            )));
        }
        if !(0.0..=1.0).contains(&sensitivity) {
            return Err(FgtError::InvalidParameter {
                name: "sensitivity",
                value: sensitivity,
                reason: "sensitivity must lie in [0, 1]".into(),
            });
        }
        Ok(Self {
            lambdas,
            pilot_bandwidth,
            sensitivity,
        })
    }

    /// All factors equal to one: the adaptive estimator reduces to the classical one.
    pub fn unit(n: usize) -> Self {
        Self {
            lambdas: vec![1.0; n],
            pilot_bandwidth: f64::NAN,
            sensitivity: 0.0,
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn pilot_bandwidth(&self) -> f64 {
        self.pilot_bandwidth
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn geometric_mean(&self) -> f64 {
        let logs: NeumaierSum = self.lambdas.iter().map(|l| l.ln()).collect();
        (logs.total() / self.lambdas.len() as f64).exp()
    }
}

// ---------------------------------------------------------------------------
// Grid helpers

#[inline]
fn pow_alpha(base: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        base
    } else if alpha.fract() == 0.0 && alpha <= 64.0 {
        base.powi(alpha as i32)
    } else {
        base.powf(alpha)
    }
}

/// `((z - x)/z)^α` for `x <= z` (with `0⁰ = 1`), zero for `x > z`.
#[inline]
pub fn shortfall_weight(x: f64, z: f64, alpha: f64) -> f64 {
    if x > z {
        0.0
    } else {
        pow_alpha((z - x) / z, alpha)
    }
}

// Grid points never exceed z by more than the snapping slack, so the base is
// clamped at zero rather than tested against z.
#[inline]
fn grid_weight(x: f64, z: f64, alpha: f64) -> f64 {
    pow_alpha(((z - x) / z).max(0.0), alpha)
}

/// `[z/h]`. When `z/h` is within a relative `1e-12` of an integer it is
/// snapped to that integer, so exact divisibility survives rounding in `z/h`.
pub fn grid_cells(z: f64, h: f64) -> Result<usize> {
    check_bandwidth(h)?;
    let q = z / h;
    if !q.is_finite() || q < 0.0 || q > MAX_GRID_CELLS as f64 {
        return Err(FgtError::InvalidArgument(format!(
            "z/h = {q} is outside the supported grid range [0, {MAX_GRID_CELLS}]"
        )));
    }
    let nearest = q.round();
    let cells = if (q - nearest).abs() <= GRID_SNAP * nearest.max(1.0) {
        nearest
    } else {
        q.floor()
    };
    Ok(cells as usize)
}

fn kernel_warnings(params: &FgtParams, h: f64) -> Vec<String> {
    let mut warnings = Vec::new();
    if !params.theory_covered() {
        warnings.push(format!(
            "alpha outside α=0 or α≥1 theory (alpha = {}); value computed from the formula as-is",
            params.alpha()
        ));
    }
    if h > params.z() {
        warnings.push(format!(
            "bandwidth h = {h} exceeds z = {}: degenerate grid with the single cell i = 0",
            params.z()
        ));
    }
    warnings
}

/// Column sums `Σⱼ K((ih - Xⱼ)/h)` and `Σⱼ K''((ih - Xⱼ)/h)` over the grid
/// `i = 0..=cells`.
///
/// Every fixed-bandwidth grid estimator at any `z <= cells·h` is a weighted
/// sum of these columns, so one table serves a whole `(z, α)` grid.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    h: f64,
    n: usize,
    correction: f64,
    k_sums: Vec<f64>,
    k2_sums: Vec<f64>,
}

impl KernelGrid {
    /// Build the table for all poverty lines up to `max_z`.
    pub fn new(sample: &IncomeSample, kernel: &Kernel, h: f64, max_z: f64) -> Result<Self> {
        let cells = grid_cells(max_z, h)?;
        let mut k_sums = Vec::with_capacity(cells + 1);
        let mut k2_sums = Vec::with_capacity(cells + 1);
        for i in 0..=cells {
            let x = i as f64 * h;
            let mut k = NeumaierSum::new();
            let mut k2 = NeumaierSum::new();
            for &xj in sample.values() {
                let u = (x - xj) / h;
                k.add(kernel.eval(u));
                k2.add(kernel.eval_second_derivative(u));
            }
            k_sums.push(k.total());
            k2_sums.push(k2.total());
        }
        Ok(Self {
            h,
            n: sample.len(),
            correction: 0.5 * h * h * kernel.second_moment(),
            k_sums,
            k2_sums,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    fn cells_for(&self, z: f64) -> Result<usize> {
        let m = grid_cells(z, self.h)?;
        if m >= self.k_sums.len() {
            return Err(FgtError::InvalidArgument(format!(
                "poverty line {z} needs {m} grid cells but the table holds {}",
                self.k_sums.len() - 1
            )));
        }
        Ok(m)
    }

    #[inline]
    fn corrected(&self, i: usize) -> f64 {
        self.k_sums[i] - self.correction * self.k2_sums[i]
    }

    /// Classical grid estimator `P_n(z, α)`.
    pub fn classical(&self, params: &FgtParams) -> Result<f64> {
        let m = self.cells_for(params.z())?;
        let acc: NeumaierSum = (0..=m)
            .map(|i| grid_weight(i as f64 * self.h, params.z(), params.alpha()) * self.k_sums[i])
            .collect();
        Ok(acc.total() / self.n as f64)
    }

    /// Bias-reduced grid estimator `P_{n,b}(z, α)`.
    pub fn bias_reduced(&self, params: &FgtParams) -> Result<f64> {
        let m = self.cells_for(params.z())?;
        let acc: NeumaierSum = (0..=m)
            .map(|i| grid_weight(i as f64 * self.h, params.z(), params.alpha()) * self.corrected(i))
            .collect();
        Ok(acc.total() / self.n as f64)
    }

    /// Boundary-cell remainder `V_{n,b}(z)`.
    pub fn remainder(&self, params: &FgtParams) -> Result<f64> {
        let m = self.cells_for(params.z())?;
        let (z, h) = (params.z(), self.h);
        let last = m as f64 * h;
        let prefactor = ((z - last) - h) / h;
        let weight = grid_weight(last, z, params.alpha());
        Ok(prefactor * weight * self.corrected(m) / self.n as f64)
    }
}

/// Per-observation kernel values `K((ihλⱼ - Xⱼ)/(hλⱼ))` for the adaptive
/// estimator, tabulated up to a maximum poverty line.
#[derive(Debug, Clone)]
pub struct AdaptiveGrid {
    steps: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl AdaptiveGrid {
    pub fn new(sample: &IncomeSample, kernel: &Kernel, h: f64, factors: &LocalFactors, max_z: f64) -> Result<Self> {
        check_bandwidth(h)?;
        if factors.lambdas().len() != sample.len() {
            return Err(FgtError::InvalidArgument(format!(
                "{} local bandwidth factors for a sample of size {}",
                factors.lambdas().len(),
                sample.len()
            )));
        }
        let mut steps = Vec::with_capacity(sample.len());
        let mut values = Vec::with_capacity(sample.len());
        for (&xj, &lambda) in sample.values().iter().zip(factors.lambdas()) {
            let hj = h * lambda;
            let cells = grid_cells(max_z, hj)?;
            values.push(
                (0..=cells)
                    .map(|i| kernel.eval((i as f64 * hj - xj) / hj))
                    .collect::<Vec<_>>(),
            );
            steps.push(hj);
        }
        Ok(Self { steps, values })
    }

    /// Adaptive grid estimator `P_n^λ(z, α)`.
    pub fn estimate(&self, params: &FgtParams) -> Result<f64> {
        let mut acc = NeumaierSum::new();
        for (&hj, column) in self.steps.iter().zip(&self.values) {
            let m = grid_cells(params.z(), hj)?;
            if m >= column.len() {
                return Err(FgtError::InvalidArgument(format!(
                    "poverty line {} is beyond the tabulated adaptive grid",
                    params.z()
                )));
            }
            for (i, &k) in column[..=m].iter().enumerate() {
                acc.add(grid_weight(i as f64 * hj, params.z(), params.alpha()) * k);
            }
        }
        Ok(acc.total() / self.steps.len() as f64)
    }
}

// ---------------------------------------------------------------------------
// Public estimator entry points

/// Plug-in estimator `(1/n) Σ (1 - Xᵢ/z)₊^α`; for `α = 0` the headcount `#{Xᵢ < z}/n`.
pub fn empirical_fgt(sample: &IncomeSample, params: &FgtParams) -> FgtEstimate {
    let (z, alpha) = (params.z(), params.alpha());
    let acc: NeumaierSum = sample
        .values()
        .iter()
        .map(|&x| if x >= z { 0.0 } else { pow_alpha(1.0 - x / z, alpha) })
        .collect();
    FgtEstimate {
        value: acc.total() / sample.len() as f64,
        estimator: EstimatorId::Empirical,
        bandwidth: None,
        grid_cells: None,
        n: sample.len(),
        warnings: Vec::new(),
    }
}

fn kernel_estimate(
    estimator: EstimatorId,
    value: f64,
    sample: &IncomeSample,
    h: f64,
    params: &FgtParams,
) -> Result<FgtEstimate> {
    Ok(FgtEstimate {
        value,
        estimator,
        bandwidth: Some(h),
        grid_cells: Some(grid_cells(params.z(), h)?),
        n: sample.len(),
        warnings: kernel_warnings(params, h),
    })
}

/// Classical grid estimator `(1/n) Σⱼ Σ_{i=0}^{[z/h]} ((z-ih)/z)^α K((ih-Xⱼ)/h)`.
pub fn classical_kernel_fgt(sample: &IncomeSample, kernel: &Kernel, h: f64, params: &FgtParams) -> Result<FgtEstimate> {
    let grid = KernelGrid::new(sample, kernel, h, params.z())?;
    kernel_estimate(EstimatorId::Classical, grid.classical(params)?, sample, h, params)
}

/// Bias-reduced grid estimator `P_{n,b}(z, α)`.
pub fn bias_reduced_fgt(sample: &IncomeSample, kernel: &Kernel, h: f64, params: &FgtParams) -> Result<FgtEstimate> {
    let grid = KernelGrid::new(sample, kernel, h, params.z())?;
    kernel_estimate(EstimatorId::BiasReduced, grid.bias_reduced(params)?, sample, h, params)
}

/// Adaptive grid estimator with per-observation bandwidth `hλⱼ` and grid
/// `{ihλⱼ : 0 <= i <= [z/(hλⱼ)]}`.
pub fn adaptive_kernel_fgt(
    sample: &IncomeSample,
    kernel: &Kernel,
    h: f64,
    factors: &LocalFactors,
    params: &FgtParams,
) -> Result<FgtEstimate> {
    let grid = AdaptiveGrid::new(sample, kernel, h, factors, params.z())?;
    kernel_estimate(EstimatorId::Adaptive, grid.estimate(params)?, sample, h, params)
}

/// Silverman-style factors `λⱼ = (f̂(Xⱼ)/g)^(-sensitivity)`, `g` the geometric
/// mean of the pilot values `f̂(Xⱼ)` (floored at `1e-12`).
pub fn local_bandwidth_factors(
    sample: &IncomeSample,
    kernel: &Kernel,
    pilot_h: f64,
    sensitivity: f64,
) -> Result<LocalFactors> {
    check_bandwidth(pilot_h)?;
    if !(0.0..=1.0).contains(&sensitivity) {
        return Err(FgtError::InvalidParameter {
            name: "sensitivity",
            value: sensitivity,
            reason: "sensitivity must lie in [0, 1]".into(),
        });
    }
    let log_pilot = match kernel.integration_radius() {
        Some(radius) => {
            // Only observations within radius·h of x contribute.
            let mut sorted = sample.values().to_vec();
            sorted.sort_by(f64::total_cmp);
            let reach = radius * pilot_h;
            let scale = sample.len() as f64 * pilot_h;
            sample
                .values()
                .iter()
                .map(|&x| {
                    let lo = sorted.partition_point(|&v| v < x - reach);
                    let hi = sorted.partition_point(|&v| v <= x + reach);
                    let sum: NeumaierSum = sorted[lo..hi].iter().map(|&v| kernel.eval((x - v) / pilot_h)).collect();
                    (sum.total() / scale).max(PILOT_FLOOR).ln()
                })
                .collect::<Vec<_>>()
        }
        None => sample
            .values()
            .iter()
            .map(|&x| classical_density(sample, kernel, pilot_h, x).map(|f| f.max(PILOT_FLOOR).ln()))
            .collect::<Result<Vec<_>>>()?,
    };
    let log_g = log_pilot.iter().copied().collect::<NeumaierSum>().total() / log_pilot.len() as f64;
    let lambdas = log_pilot
        .iter()
        .map(|&lf| {
            if sensitivity == 0.0 {
                1.0
            } else {
                (-sensitivity * (lf - log_g)).exp()
            }
        })
        .collect();
    LocalFactors::new(lambdas, pilot_h, sensitivity)
}

/// Boundary-cell remainder
/// `V_{n,b}(z) = (1/n) Σⱼ ((z - h[z/h]) - h)/h · (1 - h[z/h]/z)^α · [K(·) - (h²/2)μ₂K''(·)]`
/// evaluated at the last grid point `[z/h]h`.
pub fn remainder_term(sample: &IncomeSample, kernel: &Kernel, h: f64, params: &FgtParams) -> Result<f64> {
    let grid = KernelGrid::new(sample, kernel, h, params.z())?;
    grid.remainder(params)
}

/// `∫₀^z ((z-x)/z)^α f̃(x) dx` by adaptive quadrature, `f̃` the bias-corrected density.
pub fn integral_form_fgt(sample: &IncomeSample, kernel: &Kernel, h: f64, params: &FgtParams, tol: f64) -> Result<f64> {
    check_bandwidth(h)?;
    let (z, alpha) = (params.z(), params.alpha());
    // Probe once so a bad bandwidth surfaces as itself rather than inside the integrand.
    bias_corrected_density(sample, kernel, h, 0.0)?;
    let r = integrate(
        |x| shortfall_weight(x, z, alpha) * bias_corrected_density(sample, kernel, h, x).unwrap_or(f64::NAN),
        0.0,
        z,
        tol,
    )?;
    Ok(r.value)
}
