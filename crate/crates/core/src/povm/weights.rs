use serde::{Deserialize, Serialize};

use super::readout::{check_eta, ClickSet};
use crate::error::{param, Error, Result};

/// Scalar detector parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    /// Readout efficiency `η`.
    pub eta: f64,
    pub click: ClickSet,
    /// Thermal occupation `N̄` of the amplifier's target mode.
    pub nbar: f64,
    /// Thermal occupation `N̄′` of the reflected trigger mode.
    pub nbar_prime: f64,
    /// Nonlinear gain `G`.
    pub gain: u64,
    /// Trigger weight `𝒲` multiplying `w_T` (1 for an infinite window).
    #[serde(default = "one")]
    pub trigger_weight: f64,
    /// Target bound on the neglected tails of both weight sums.
    #[serde(default = "default_truncation")]
    pub truncation: f64,
    /// Largest photon number summed before giving up.
    #[serde(default = "default_max_n")]
    pub max_n: u64,
}

fn one() -> f64 {
    1.0
}

fn default_truncation() -> f64 {
    1e-12
}

fn default_max_n() -> u64 {
    20_000
}

impl DetectorSpec {
    pub fn new(eta: f64, click: ClickSet, nbar: f64, nbar_prime: f64, gain: u64) -> Self {
        DetectorSpec {
            eta,
            click,
            nbar,
            nbar_prime,
            gain,
            trigger_weight: 1.0,
            truncation: default_truncation(),
            max_n: default_max_n(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_eta(self.eta)?;
        self.click.validate()?;
        for (name, v) in [("nbar", self.nbar), ("nbar_prime", self.nbar_prime)] {
            if !(v >= 0.0) || !v.is_finite() {
                return param(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if self.gain < 1 {
            return param("gain must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.trigger_weight) {
            return param(format!(
                "trigger weight must lie in [0, 1], got {}",
                self.trigger_weight
            ));
        }
        if !(self.truncation > 0.0) {
            return param("truncation tolerance must be positive");
        }
        Ok(())
    }
}

/// Vacuum and single-photon weights with their truncation bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PovmWeights {
    pub w0: f64,
    pub wt: f64,
    /// Upper bounds on the neglected parts of the two sums.
    pub tail_w0: f64,
    pub tail_wt: f64,
    /// Photon numbers summed.
    pub terms: u64,
}

/// Geometric (thermal) law `N̄^j/(1+N̄)^{j+1}`.
fn thermal_law(nbar: f64, j: u64) -> f64 {
    if nbar == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let q = nbar / (1.0 + nbar);
    (j as f64 * q.ln()).exp() / (1.0 + nbar)
}

/// Weights for filter overlaps `τ`, `ρ`.
///
/// With `Pclick(n) = Σ_{k∈K} Pr(k|n)`,
/// `w₀ = Σ_n Pclick(n) Σ_{m ≤ n/G} P_th(n−Gm) P′(m) ρ^{2m}` and
/// `w_T = 𝒲 Σ_n Pclick(n) Σ_{1 ≤ m ≤ n/G} m P_th(n−Gm) P′(m−1) τ² ρ^{2(m−1)}`.
/// Both inner sums have closed-form totals over `n`, so the tail beyond
/// the last summed `n` is bounded by the total minus the partial sum of
/// the inner sums (`Pclick ≤ 1`).
pub fn povm_weights(spec: &DetectorSpec, tau: f64, rho: f64) -> Result<PovmWeights> {
    spec.validate()?;
    if !(0.0..=1.0 + 1e-9).contains(&tau) || !(0.0..=1.0 + 1e-9).contains(&rho) {
        return param(format!("overlaps must lie in [0, 1] (tau={tau}, rho={rho})"));
    }
    let (t2, r2) = (tau * tau, rho * rho);
    let np = spec.nbar_prime;
    let x = r2 * np / (1.0 + np);
    let total_v = 1.0 / ((1.0 + np) * (1.0 - x));
    let total_s = t2 / ((1.0 + np) * (1.0 - x) * (1.0 - x));
    let g = spec.gain;
    let eps = spec.truncation;

    let (mut w0, mut wt) = (0.0, 0.0);
    let (mut part_v, mut part_s) = (0.0, 0.0);
    let mut n = 0u64;
    loop {
        let mut v = 0.0;
        let mut s = 0.0;
        // ρ^{2m} and ρ^{2(m−1)}.
        let (mut r_pow, mut r_prev) = (1.0, 0.0);
        for m in 0..=n / g {
            let pth = thermal_law(spec.nbar, n - g * m);
            v += pth * thermal_law(np, m) * r_pow;
            if m >= 1 {
                s += m as f64 * pth * thermal_law(np, m - 1) * t2 * r_prev;
            }
            r_prev = r_pow;
            r_pow *= r2;
        }
        part_v += v;
        part_s += s;
        let click = spec.click.click_probability(n, spec.eta);
        w0 += click * v;
        wt += click * s;
        let tail_v = (total_v - part_v).max(0.0);
        let tail_s = (total_s - part_s).max(0.0);
        if (tail_v < eps && tail_s < eps) || n >= spec.max_n {
            if tail_v >= eps || tail_s >= eps {
                return Err(Error::Truncation {
                    achieved: tail_v.max(tail_s),
                    requested: eps,
                });
            }
            return Ok(PovmWeights {
                w0,
                wt: wt * spec.trigger_weight,
                tail_w0: tail_v,
                tail_wt: tail_s * spec.trigger_weight,
                terms: n + 1,
            });
        }
        n += 1;
    }
}
