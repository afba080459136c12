//! Reference evaluations written directly from the defining sums, sharing no
//! code with the library beyond the sample type.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn phi(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

pub fn phi2(u: f64) -> f64 {
    (u * u - 1.0) * phi(u)
}

/// `(1 - x/z)^α` with `0^0 = 1`, zero past the poverty line.
pub fn grid_weight(x: f64, z: f64, alpha: f64) -> f64 {
    if x > z {
        return 0.0;
    }
    let base = (1.0 - x / z).max(0.0);
    if alpha == 0.0 {
        1.0
    } else {
        base.powf(alpha)
    }
}

/// `(1/n) Σ (1 - Xᵢ/z)₊^α` with the indicator `Xᵢ < z` at `α = 0`.
pub fn empirical(sample: &[f64], z: f64, alpha: f64) -> f64 {
    let mut s = 0.0;
    for &x in sample {
        if x < z {
            s += if alpha == 0.0 { 1.0 } else { (1.0 - x / z).powf(alpha) };
        }
    }
    s / sample.len() as f64
}

/// `[z/h]`, rejecting cases too close to an integer to be unambiguous.
pub fn last_cell(z: f64, h: f64) -> Option<usize> {
    let r = z / h;
    if (r - r.round()).abs() < 1e-9 {
        None
    } else {
        Some(r.floor() as usize)
    }
}

/// `[K - c K''](u)` summed over the sample at grid point `x`.
fn column(sample: &[f64], x: f64, h: f64, c: f64) -> f64 {
    sample
        .iter()
        .map(|&xj| phi((x - xj) / h) - c * phi2((x - xj) / h))
        .sum()
}

/// Grid estimator with correction coefficient `c` (0: classical, h²μ₂/2: bias-reduced).
pub fn grid_estimator(sample: &[f64], z: f64, alpha: f64, h: f64, c: f64, m: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..=m {
        let x = i as f64 * h;
        s += grid_weight(x, z, alpha) * column(sample, x, h, c);
    }
    s / sample.len() as f64
}

/// Riemann sum over `[0, z]`: full cells `0..m-1` plus the partial cell of
/// width `z - mh` at height `(1/nh) w_m Σ[K - cK'']`.
pub fn riemann_sum(sample: &[f64], z: f64, alpha: f64, h: f64, c: f64, m: usize) -> f64 {
    let n = sample.len() as f64;
    let mut s = 0.0;
    for i in 0..m {
        let x = i as f64 * h;
        s += grid_weight(x, z, alpha) * column(sample, x, h, c) / n;
    }
    let xm = m as f64 * h;
    s + (z - xm) * grid_weight(xm, z, alpha) * column(sample, xm, h, c) / (n * h)
}

/// Adaptive grid estimator with per-observation steps `hλⱼ`.
pub fn adaptive(sample: &[f64], lambdas: &[f64], z: f64, alpha: f64, h: f64) -> f64 {
    let mut s = 0.0;
    for (&xj, &l) in sample.iter().zip(lambdas) {
        let hj = h * l;
        let m = (z / hj).floor() as usize;
        for i in 0..=m {
            let x = i as f64 * hj;
            s += grid_weight(x, z, alpha) * phi((x - xj) / hj);
        }
    }
    s / sample.len() as f64
}

/// Truncated Pareto on `[x0, u]`: `∫_{x0}^{b} x^k f(x) dx`.
pub fn pareto_partial_moment(x0: f64, beta: f64, u: f64, b: f64, k: f64) -> f64 {
    let mass = 1.0 - (x0 / u).powf(beta);
    let b = b.min(u);
    if b <= x0 {
        return 0.0;
    }
    beta * x0.powf(beta) / (mass * (k - beta)) * (b.powf(k - beta) - x0.powf(k - beta))
}

/// Closed-form index of the truncated Pareto for integer `α`.
pub fn pareto_fgt(x0: f64, beta: f64, u: f64, z: f64, alpha: u32) -> f64 {
    // (1 - x/z)^α = Σ_k C(α, k) (-1/z)^k x^k
    let mut s = 0.0;
    let mut binom = 1.0;
    for k in 0..=alpha {
        s += binom * (-1.0 / z).powi(k as i32) * pareto_partial_moment(x0, beta, u, z, k as f64);
        binom = binom * (alpha - k) as f64 / (k + 1) as f64;
    }
    s
}

/// Composite Simpson rule with `cells` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let cells = cells + cells % 2;
    let h = (b - a) / cells as f64;
    let mut s = f(a) + f(b);
    for i in 1..cells {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
