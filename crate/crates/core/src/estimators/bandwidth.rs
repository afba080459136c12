//! Bandwidth rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_bandwidth, FgtError, Result};

/// `h = (n ln n)^(-1/2)`, the rule used in the reference simulation design.
pub fn default_bandwidth(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(FgtError::InvalidArgument(format!(
            "(n ln n)^(-1/2) bandwidth needs n >= 2, got {n}"
        )));
    }
    let n = n as f64;
    Ok((n * n.ln()).sqrt().recip())
}

/// `h = ((ln ln n) / n)^(1/4)`, the rate under which the bias is `O((ln ln n / n)^(3/4))`.
pub fn lil_bandwidth(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(FgtError::InvalidArgument(format!(
            "((ln ln n)/n)^(1/4) bandwidth needs n >= 3, got {n}"
        )));
    }
    let n = n as f64;
    Ok((n.ln().ln() / n).powf(0.25))
}

/// `n h² / ln ln n`; uniform almost-sure consistency needs this to diverge.
pub fn regime_ratio(n: usize, h: f64) -> f64 {
    let nf = n as f64;
    nf * h * h / nf.ln().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// `(n ln n)^(-1/2)`
    Nlogn,
    /// `((ln ln n)/n)^(1/4)`
    Lil,
    Fixed(f64),
}

impl BandwidthRule {
    pub fn resolve(&self, n: usize) -> Result<f64> {
        match *self {
            BandwidthRule::Nlogn => default_bandwidth(n),
            BandwidthRule::Lil => lil_bandwidth(n),
            BandwidthRule::Fixed(h) => {
                check_bandwidth(h)?;
                Ok(h)
            }
        }
    }

    /// Whether the rule makes `n h² / ln ln n → ∞` while `h → 0`.
    ///
    /// For `(n ln n)^(-1/2)`, `n h² = 1/ln n`, so the ratio vanishes instead.
    pub fn in_consistency_regime(&self) -> bool {
        matches!(self, BandwidthRule::Lil)
    }

    pub fn regime_note(&self, n: usize) -> Option<String> {
        let h = self.resolve(n).ok()?;
        match self {
            BandwidthRule::Lil => None,
            BandwidthRule::Nlogn => Some(format!(
                "bandwidth rule {self}: n·h²/ln ln n = {:.4} tends to 0, outside the regime \
                 n·h²/ln ln n → ∞ under which uniform almost-sure consistency is established",
                regime_ratio(n, h)
            )),
            BandwidthRule::Fixed(_) => Some(format!(
                "fixed bandwidth h = {h} does not shrink with n; consistency results do not apply"
            )),
        }
    }
}

impl fmt::Display for BandwidthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthRule::Nlogn => f.write_str("nlogn"),
            BandwidthRule::Lil => f.write_str("lil"),
            BandwidthRule::Fixed(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for BandwidthRule {
    type Err = FgtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nlogn" | "default" => Ok(BandwidthRule::Nlogn),
            "lil" => Ok(BandwidthRule::Lil),
            other => {
                let h: f64 = other
                    .parse()
                    .map_err(|_| FgtError::Parse(format!("bandwidth `{s}` is not nlogn, lil or a number")))?;
                check_bandwidth(h)?;
                Ok(BandwidthRule::Fixed(h))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nlogn_values() {
        // (1000 · ln 1000)^(-1/2)
        assert!((default_bandwidth(1000).unwrap() - 0.012_031_825_6).abs() < 1e-10);
        assert!(default_bandwidth(1).is_err());
        let mut prev = default_bandwidth(2).unwrap();
        for n in 3..5000 {
            let h = default_bandwidth(n).unwrap();
            assert!(h < prev);
            prev = h;
        }
    }

    #[test]
    fn nlogn_is_outside_the_consistency_regime() {
        let h = default_bandwidth(1000).unwrap();
        assert!((1000.0 * h * h - 1.0 / 1000f64.ln()).abs() < 1e-12);
        assert!(!BandwidthRule::Nlogn.in_consistency_regime());
        assert!(BandwidthRule::Nlogn.regime_note(1000).is_some());
        assert!(regime_ratio(1_000_000, default_bandwidth(1_000_000).unwrap()) < regime_ratio(1000, h));
    }

    #[test]
    fn lil_values() {
        assert!((lil_bandwidth(1000).unwrap() - 0.209_670_826).abs() < 1e-8);
        assert!((lil_bandwidth(1_000_000).unwrap() - 0.040_254_559).abs() < 1e-8);
        assert!(lil_bandwidth(2).is_err());
        let mut prev = lil_bandwidth(16).unwrap();
        for n in 17..20_000 {
            let h = lil_bandwidth(n).unwrap();
            assert!(h < prev, "n = {n}");
            prev = h;
        }
        assert!(BandwidthRule::Lil.in_consistency_regime());
    }

    #[test]
    fn parse_rules() {
        assert_eq!("nlogn".parse::<BandwidthRule>().unwrap(), BandwidthRule::Nlogn);
        assert_eq!("LIL".parse::<BandwidthRule>().unwrap(), BandwidthRule::Lil);
        assert_eq!("0.05".parse::<BandwidthRule>().unwrap(), BandwidthRule::Fixed(0.05));
        assert!("-1".parse::<BandwidthRule>().is_err());
        assert!("wide".parse::<BandwidthRule>().is_err());
    }
}
