//! Limiting variance of the bias-reduced estimator and its efficiency
//! relative to the empirical estimator.

use serde::Serialize;

use crate::error::{FgtError, Result};
use crate::kernels::Kernel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticVariance {
    /// `R(K)·P(z,2α) - P(z,α)²`, returned verbatim even when negative.
    pub value: f64,
    pub warnings: Vec<String>,
}

/// Limit of `n·Var(P_{n,b}(z,α))`: `R(K)·P(z,2α) - P(z,α)²`.
pub fn asymptotic_variance(kernel: &Kernel, p_z_alpha: f64, p_z_2alpha: f64) -> AsymptoticVariance {
    let mut warnings = Vec::new();
    for (label, p) in [("P(z,α)", p_z_alpha), ("P(z,2α)", p_z_2alpha)] {
        if !(0.0..=1.0).contains(&p) {
            warnings.push(format!("{label} = {p} lies outside [0, 1]"));
        }
    }
    if p_z_2alpha > p_z_alpha {
        warnings.push(format!(
            "P(z,2α) = {p_z_2alpha} exceeds P(z,α) = {p_z_alpha}; the index is nonincreasing in α"
        ));
    }
    let value = kernel.square_integral() * p_z_2alpha - p_z_alpha * p_z_alpha;
    if value < 0.0 {
        warnings.push(format!(
            "limiting variance formula is negative ({value:.7}); a variance cannot be negative"
        ));
    }
    AsymptoticVariance { value, warnings }
}

/// `e(z,α) = (R(K)·P(z,2α) - P(z,α)²) / (P(z,2α) - P(z,α)²)`.
pub fn efficiency(kernel: &Kernel, p_z_alpha: f64, p_z_2alpha: f64) -> Result<f64> {
    let denominator = p_z_2alpha - p_z_alpha * p_z_alpha;
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(FgtError::DegenerateCase(format!(
            "P(z,2α) - P(z,α)² = {denominator}; efficiency is undefined"
        )));
    }
    Ok((kernel.square_integral() * p_z_2alpha - p_z_alpha * p_z_alpha) / denominator)
}
