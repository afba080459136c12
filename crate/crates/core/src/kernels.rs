//! Smoothing kernels carrying their closed-form second derivative, plus
//! the two pointwise density estimates built from them.
//!
//! A [`Kernel`] bundles `K`, `K''`, the second moment `μ₂ = ∫u²K(u)du` and
//! the roughness `R(K) = ∫K²(u)du`. The bias-corrected density subtracts the
//! plug-in estimate of the leading `O(h²)` smoothing bias:
//!
//! ```text
//! f̃(x) = (1/nh) Σ K((x-Xᵢ)/h) - (h/2n) μ₂ Σ K''((x-Xᵢ)/h)
//! ```
//!
//! The correction is signed, so `f̃` can be negative; it is never clipped.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::distributions::IncomeSample;
use crate::error::{check_bandwidth, FgtError, Result};
use crate::quadrature::integrate;
use crate::sum::NeumaierSum;

/// Shared, thread-safe scalar function of one variable.
pub type KernelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Integration radius used for the Gaussian kernel; tail mass beyond it is below 1e-15.
pub const GAUSSIAN_SUPPORT_RADIUS: f64 = 8.0;

/// Threshold below which `|K|` and `|K''|` count as negligible when searching
/// for a numerical support radius.
pub const NEGLIGIBLE: f64 = 1e-12;

/// Immutable smoothing-kernel bundle.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    eval: KernelFn,
    second_derivative: KernelFn,
    second_moment: f64,
    square_integral: f64,
    effective_support_radius: f64,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("second_moment", &self.second_moment)
            .field("square_integral", &self.square_integral)
            .field("effective_support_radius", &self.effective_support_radius)
            .finish_non_exhaustive()
    }
}

impl Kernel {
    /// Build a kernel from closures. `effective_support_radius` may be
    /// `f64::INFINITY`, in which case a radius is searched numerically when
    /// one is needed.
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_moment: f64,
        square_integral: f64,
        effective_support_radius: f64,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            second_derivative: Arc::new(second_derivative),
            second_moment,
            square_integral,
            effective_support_radius,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    #[inline]
    pub fn eval_second_derivative(&self, u: f64) -> f64 {
        (self.second_derivative)(u)
    }

    /// `μ₂ = ∫u²K(u)du`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    /// `R(K) = ∫K²(u)du`.
    pub fn square_integral(&self) -> f64 {
        self.square_integral
    }

    pub fn effective_support_radius(&self) -> f64 {
        self.effective_support_radius
    }

    /// Same kernel with a different stored second moment. Forcing it to zero
    /// turns the bias-reduced estimator back into the classical one.
    pub fn with_second_moment(mut self, second_moment: f64) -> Self {
        self.second_moment = second_moment;
        self
    }

    /// Zero `K` and `K''` outside `[-radius, radius]`.
    pub fn truncated(self, radius: f64) -> Self {
        let eval = Arc::clone(&self.eval);
        let second = Arc::clone(&self.second_derivative);
        Self {
            name: format!("{}-truncated-{radius}", self.name),
            eval: Arc::new(move |u| if u.abs() <= radius { eval(u) } else { 0.0 }),
            second_derivative: Arc::new(move |u| if u.abs() <= radius { second(u) } else { 0.0 }),
            effective_support_radius: radius.min(self.effective_support_radius),
            ..self
        }
    }

    /// Radius used for numerical integration. Finite stored radii are used
    /// as-is; otherwise the radius is doubled from 1 until `|K|` and `|K''|`
    /// stay below [`NEGLIGIBLE`] on `[r, 2r]`. `None` if no such radius below
    /// 2²⁰ exists.
    pub fn integration_radius(&self) -> Option<f64> {
        if self.effective_support_radius.is_finite() {
            return Some(self.effective_support_radius);
        }
        let mut r = 1.0;
        while r <= (1u64 << 20) as f64 {
            let negligible = (0..=256).all(|k| {
                let u = r * (1.0 + k as f64 / 256.0);
                [u, -u]
                    .iter()
                    .all(|&v| self.eval(v).abs() < NEGLIGIBLE && self.eval_second_derivative(v).abs() < NEGLIGIBLE)
            });
            if negligible {
                return Some(r);
            }
            r *= 2.0;
        }
        None
    }
}

/// Standard normal kernel `K(u) = exp(-u²/2)/√(2π)` with `K''(u) = (u²-1)K(u)`.
pub fn gaussian_kernel() -> Kernel {
    fn phi(u: f64) -> f64 {
        (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
    }
    Kernel::new(
        "gaussian",
        phi,
        |u| (u * u - 1.0) * phi(u),
        1.0,
        1.0 / (2.0 * PI.sqrt()),
        GAUSSIAN_SUPPORT_RADIUS,
    )
}

/// Look a kernel up by its CLI/config name.
pub fn kernel_by_name(name: &str) -> Result<Kernel> {
    match name.to_ascii_lowercase().as_str() {
        "gaussian" | "normal" => Ok(gaussian_kernel()),
        _ => Err(FgtError::UnknownKernel(name.to_string())),
    }
}

/// Parzen–Rosenblatt estimate `(1/nh) Σ K((x-Xᵢ)/h)`.
pub fn classical_density(sample: &IncomeSample, kernel: &Kernel, h: f64, x: f64) -> Result<f64> {
    check_bandwidth(h)?;
    let n = sample.len() as f64;
    let sum: NeumaierSum = sample.values().iter().map(|&xi| kernel.eval((x - xi) / h)).collect();
    Ok(sum.total() / (n * h))
}

/// Bias-corrected estimate `(1/nh) Σ K(·) - (h/2n) μ₂ Σ K''(·)`. May be negative.
pub fn bias_corrected_density(sample: &IncomeSample, kernel: &Kernel, h: f64, x: f64) -> Result<f64> {
    check_bandwidth(h)?;
    let n = sample.len() as f64;
    let mut k_sum = NeumaierSum::new();
    let mut k2_sum = NeumaierSum::new();
    for &xi in sample.values() {
        let u = (x - xi) / h;
        k_sum.add(kernel.eval(u));
        k2_sum.add(kernel.eval_second_derivative(u));
    }
    Ok(k_sum.total() / (n * h) - h / (2.0 * n) * kernel.second_moment() * k2_sum.total())
}

// ---------------------------------------------------------------------------
// Hypothesis verification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `sup |K| < ∞`
    H1,
    /// `∫K = 1` (for `K''` read as `∫K'' = 0`)
    H2,
    /// `|uK(u)| → 0` in the tails
    H3,
    /// bounded variation
    H4,
    /// `∫|uK| < ∞` and `∫u²K < ∞`
    H5,
    /// Lipschitz majorant; not machine-checkable
    H6,
    /// Stored `μ₂` and `R(K)` agree with quadrature.
    StoredMoments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckedFunction {
    Kernel,
    SecondDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Informational,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub function: CheckedFunction,
    pub status: CheckStatus,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub kernel: String,
    pub tol: f64,
    pub integration_radius: Option<f64>,
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    /// True when every non-informational check passed.
    pub fn all_checkable_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, hypothesis: Hypothesis, function: CheckedFunction) -> Option<&HypothesisCheck> {
        self.checks
            .iter()
            .find(|c| c.hypothesis == hypothesis && c.function == function)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

const TAIL_THRESHOLD: f64 = 1e-10;
const MOMENT_TOLERANCE: f64 = 1e-8;
const SUP_GRID: usize = 20_000;
const TAIL_GRID: usize = 2_000;
const VARIATION_GRID: usize = 4_000;

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn total_variation(f: &dyn Fn(f64) -> f64, radius: f64, cells: usize) -> f64 {
    let step = 2.0 * radius / cells as f64;
    let mut prev = f(-radius);
    let mut acc = NeumaierSum::new();
    for k in 1..=cells {
        let v = f(-radius + k as f64 * step);
        acc.add((v - prev).abs());
        prev = v;
    }
    acc.total()
}

fn quad_or_nan(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, Option<String>) {
    match integrate(f, a, b, tol) {
        Ok(r) => (r.value, None),
        Err(FgtError::NumericalFailure {
            best_estimate, message, ..
        }) => (best_estimate, Some(message)),
        Err(e) => (f64::NAN, Some(e.to_string())),
    }
}

/// Check H1–H5 numerically for `K` and `K''`, the stored moments, and list
/// H6 as informational. Never panics on a bad kernel: failures are recorded
/// in the report.
pub fn verify_hypotheses(kernel: &Kernel, tol: f64) -> Result<HypothesisReport> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(FgtError::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "tolerance must be finite and > 0".into(),
        });
    }
    let mut checks = Vec::new();
    let radius = kernel.integration_radius();
    let Some(r) = radius else {
        for hypothesis in [
            Hypothesis::H1,
            Hypothesis::H2,
            Hypothesis::H3,
            Hypothesis::H4,
            Hypothesis::H5,
        ] {
            for function in [CheckedFunction::Kernel, CheckedFunction::SecondDerivative] {
                checks.push(HypothesisCheck {
                    hypothesis,
                    function,
                    status: CheckStatus::Fail,
                    measured: f64::NAN,
                    threshold: NEGLIGIBLE,
                    detail: "no finite radius beyond which the kernel is negligible".into(),
                });
            }
        }
        push_h6(&mut checks);
        return Ok(HypothesisReport {
            kernel: kernel.name().to_string(),
            tol,
            integration_radius: None,
            checks,
        });
    };
    let quad_tol = (tol * 1e-2).max(1e-14);

    let k_fn = |u: f64| kernel.eval(u);
    let k2_fn = |u: f64| kernel.eval_second_derivative(u);
    let targets: [(CheckedFunction, &dyn Fn(f64) -> f64); 2] = [
        (CheckedFunction::Kernel, &k_fn),
        (CheckedFunction::SecondDerivative, &k2_fn),
    ];

    for (function, f) in targets {
        // H1: sup over a dense grid on [-2R, 2R].
        let sup = (0..=SUP_GRID)
            .map(|k| f(-2.0 * r + 4.0 * r * k as f64 / SUP_GRID as f64).abs())
            .fold(0.0_f64, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        checks.push(HypothesisCheck {
            hypothesis: Hypothesis::H1,
            function,
            status: status(sup.is_finite()),
            measured: sup,
            threshold: f64::INFINITY,
            detail: format!("max |f| over {} points on [-{}, {}]", SUP_GRID + 1, 2.0 * r, 2.0 * r),
        });

        // H2: ∫K = 1, ∫K'' = 0.
        let (integral, failure) = quad_or_nan(f, -r, r, quad_tol);
        let target = match function {
            CheckedFunction::Kernel => 1.0,
            CheckedFunction::SecondDerivative => 0.0,
        };
        let deviation = (integral - target).abs();
        checks.push(HypothesisCheck {
            hypothesis: Hypothesis::H2,
            function,
            status: status(failure.is_none() && deviation <= tol),
            measured: integral,
            threshold: tol,
            detail: match failure {
                Some(msg) => msg,
                None => format!("integral over [-{r}, {r}], target {target}"),
            },
        });

        // H3: |u f(u)| small on |u| in [R, 2R].
        let tail = (0..=TAIL_GRID)
            .map(|k| r * (1.0 + k as f64 / TAIL_GRID as f64))
            .map(|u| (u * f(u)).abs().max((u * f(-u)).abs()))
            .fold(0.0_f64, f64::max);
        checks.push(HypothesisCheck {
            hypothesis: Hypothesis::H3,
            function,
            status: status(tail < TAIL_THRESHOLD),
            measured: tail,
            threshold: TAIL_THRESHOLD,
            detail: format!("max |u f(u)| over |u| in [{r}, {}]", 2.0 * r),
        });

        // H4: total variation converges under grid refinement.
        let coarse = total_variation(f, r, VARIATION_GRID);
        let fine = total_variation(f, r, 2 * VARIATION_GRID);
        let drift = (fine - coarse).abs();
        let allowed = 1e-3 * fine.abs().max(1.0);
        checks.push(HypothesisCheck {
            hypothesis: Hypothesis::H4,
            function,
            status: status(fine.is_finite() && drift <= allowed),
            measured: fine,
            threshold: allowed,
            detail: format!(
                "variation {coarse} on {VARIATION_GRID} cells, {fine} on {} cells",
                2 * VARIATION_GRID
            ),
        });

        // H5: first absolute and second moments finite with negligible tails.
        let (abs_first, f1) = quad_or_nan(|u| (u * f(u)).abs(), -r, r, quad_tol);
        let (second, f2) = quad_or_nan(|u| u * u * f(u), -r, r, quad_tol);
        let (tail_mass, f3) = quad_or_nan(|u| (u * u + u.abs()) * (f(u).abs() + f(-u).abs()), r, 2.0 * r, quad_tol);
        let failure = f1.or(f2).or(f3);
        checks.push(HypothesisCheck {
            hypothesis: Hypothesis::H5,
            function,
            status: status(failure.is_none() && abs_first.is_finite() && second.is_finite() && tail_mass <= tol),
            measured: abs_first,
            threshold: tol,
            detail: match failure {
                Some(msg) => msg,
                None => format!("∫|u f| = {abs_first}, ∫u² f = {second}, tail contribution {tail_mass:e}"),
            },
        });
    }

    let (mu2, e1) = quad_or_nan(|u| u * u * kernel.eval(u), -r, r, 1e-13);
    let (rk, e2) = quad_or_nan(|u| kernel.eval(u).powi(2), -r, r, 1e-13);
    let moment_gap = (mu2 - kernel.second_moment())
        .abs()
        .max((rk - kernel.square_integral()).abs());
    checks.push(HypothesisCheck {
        hypothesis: Hypothesis::StoredMoments,
        function: CheckedFunction::Kernel,
        status: status(e1.is_none() && e2.is_none() && moment_gap <= MOMENT_TOLERANCE),
        measured: moment_gap,
        threshold: MOMENT_TOLERANCE,
        detail: format!(
            "quadrature μ₂ = {mu2} (stored {}), R(K) = {rk} (stored {})",
            kernel.second_moment(),
            kernel.square_integral()
        ),
    });
    push_h6(&mut checks);

    Ok(HypothesisReport {
        kernel: kernel.name().to_string(),
        tol,
        integration_radius: radius,
        checks,
    })
}

fn push_h6(checks: &mut Vec<HypothesisCheck>) {
    checks.push(HypothesisCheck {
        hypothesis: Hypothesis::H6,
        function: CheckedFunction::Kernel,
        status: CheckStatus::Informational,
        measured: f64::NAN,
        threshold: f64::NAN,
        detail: "existence of a Lipschitz majorant is not machine-checkable".into(),
    });
}
