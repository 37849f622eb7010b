use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{param, Result};

/// Probability of reading out `k` of `n` excitations with efficiency `η`.
pub fn binomial_readout(n: u64, k: u64, eta: f64) -> Result<f64> {
    if k > n {
        return param(format!("cannot read out {k} of {n} excitations"));
    }
    check_eta(eta)?;
    Ok(readout_unchecked(n, k, eta))
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return param(format!("efficiency must lie in [0, 1], got {eta}"));
    }
    Ok(())
}

pub(crate) fn readout_unchecked(n: u64, k: u64, eta: f64) -> f64 {
    if eta == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if eta == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * eta.ln() + (n - k) as f64 * (-eta).ln_1p()).exp()
}

/// Readout outcomes that count as a click.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickSet {
    /// Every `k ≥ k_min`.
    Threshold { k_min: u64 },
    /// An explicit finite set; repeated entries count once.
    Finite(Vec<u64>),
}

impl ClickSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            ClickSet::Threshold { k_min } if *k_min >= 1 => Ok(()),
            ClickSet::Finite(ks) if !ks.is_empty() && ks.iter().all(|&k| k >= 1) => Ok(()),
            _ => param("click outcomes must be non-empty and >= 1"),
        }
    }

    pub fn contains(&self, k: u64) -> bool {
        match self {
            ClickSet::Threshold { k_min } => k >= *k_min,
            ClickSet::Finite(ks) => ks.contains(&k),
        }
    }

    /// Smallest clicking outcome.
    pub fn min(&self) -> u64 {
        match self {
            ClickSet::Threshold { k_min } => *k_min,
            ClickSet::Finite(ks) => ks.iter().copied().min().unwrap_or(1),
        }
    }

    /// `Σ_{k ∈ K, k ≤ n} Pr(k|n)`.
    pub fn click_probability(&self, n: u64, eta: f64) -> f64 {
        if eta == 1.0 {
            return if self.contains(n) { 1.0 } else { 0.0 };
        }
        if eta == 0.0 || n < self.min() {
            return 0.0;
        }
        match self {
            ClickSet::Threshold { k_min } => {
                // Sum the shorter side in log space.
                if n - k_min < *k_min {
                    (*k_min..=n).map(|k| readout_unchecked(n, k, eta)).sum::<f64>().min(1.0)
                } else {
                    let below: f64 = (0..*k_min).map(|k| readout_unchecked(n, k, eta)).sum();
                    (1.0 - below).max(0.0)
                }
            }
            ClickSet::Finite(ks) => {
                let mut ks: Vec<u64> = ks.iter().copied().filter(|&k| k <= n).collect();
                ks.sort_unstable();
                ks.dedup();
                ks.into_iter().map(|k| readout_unchecked(n, k, eta)).sum()
            }
        }
    }
}
