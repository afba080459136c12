//! Globally adaptive Gauss–Kronrod (7/15) quadrature by repeated bisection.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the summed error drops below the requested
//! absolute tolerance. Panels that reach [`MAX_DEPTH`] are frozen. If the
//! tolerance cannot be met, the best estimate is returned inside
//! [`FgtError::NumericalFailure`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FgtError, Result};
use crate::sum::NeumaierSum;

/// Maximum bisection depth of a single panel.
pub const MAX_DEPTH: u32 = 60;
/// Maximum number of live panels before giving up.
pub const MAX_PANELS: usize = 50_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a successful integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut abs_k = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_k * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel {
        a,
        b,
        value,
        error,
        depth,
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Reversed limits give the negated integral; `a == b` gives zero.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(FgtError::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "tolerance must be finite and > 0".into(),
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(FgtError::InvalidArgument(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        return integrate(f, b, a, tol).map(|r| Integral { value: -r.value, ..r });
    }

    let mut evaluations = 15;
    let mut live = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let first = kronrod_panel(&f, a, b, 0);
    let mut running_error = first.error;
    let mut running_value = first.value;
    let mut frozen_error = 0.0;
    live.push(first);

    loop {
        let accept = tol.max(50.0 * f64::EPSILON * running_value.abs());
        if running_error <= accept || live.is_empty() || frozen_error > accept {
            // Exact recomputation; the running figure drifts under cancellation.
            let mut value = NeumaierSum::new();
            let mut error = NeumaierSum::new();
            for p in live.iter().chain(frozen.iter()) {
                value.add(p.value);
                error.add(p.error);
            }
            let (value, error) = (value.total(), error.total());
            let roundoff_floor = 50.0 * f64::EPSILON * value.abs();
            if error <= tol.max(roundoff_floor) {
                return Ok(Integral {
                    value,
                    error_estimate: error,
                    evaluations,
                });
            }
            if live.is_empty() || frozen_error > tol.max(roundoff_floor) {
                return Err(FgtError::NumericalFailure {
                    message: format!("quadrature on [{a}, {b}] hit the depth limit"),
                    best_estimate: value,
                    error_estimate: error,
                });
            }
            running_error = error;
            running_value = value;
        }

        let Some(worst) = live.pop() else {
            continue;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= MAX_DEPTH || mid <= worst.a || mid >= worst.b {
            frozen_error += worst.error;
            frozen.push(worst);
            continue;
        }
        if live.len() + frozen.len() >= MAX_PANELS {
            live.push(worst);
            let value = live.iter().chain(frozen.iter()).map(|p| p.value).sum();
            return Err(FgtError::NumericalFailure {
                message: format!("quadrature on [{a}, {b}] exceeded {MAX_PANELS} panels"),
                best_estimate: value,
                error_estimate: running_error,
            });
        }
        let left = kronrod_panel(&f, worst.a, mid, worst.depth + 1);
        let right = kronrod_panel(&f, mid, worst.b, worst.depth + 1);
        running_error += left.error + right.error - worst.error;
        running_value += left.value + right.value - worst.value;
        live.push(left);
        live.push(right);
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn reversed_and_empty_limits() {
        let r = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 0.5).abs() < 1e-15);
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn gaussian_tail_mass() {
        let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let r = integrate(phi, -8.0, 8.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrable_singularity_converges() {
        // ∫₀¹ x^{-1/2} dx = 2
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-9).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn non_integrable_reports_failure_with_estimate() {
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10).unwrap_err();
        match err {
            FgtError::NumericalFailure { best_estimate, .. } => assert!(best_estimate > 10.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }
}
