use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{param, Error, Result};

/// Smallest accepted number of trials.
pub const MIN_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperResolution {
    /// Click probabilities of the detectors matched to the strong and the
    /// weak mode.
    pub p1: f64,
    pub p2: f64,
    pub n1: u64,
    pub n2: u64,
    /// `N₂/N₁`.
    pub estimate: f64,
    /// `ε̂ √(1/N₁ + 1/N₂)`; `1/N₁` when no weak-mode click occurred.
    pub stderr: f64,
}

/// Click probabilities for the mixture `(|1⟩⟨1| + ε|2⟩⟨2|)/(1+ε)` of two
/// orthogonal single-photon modes, each read by a detector of efficiency
/// `η` matched to its mode.
pub fn super_resolution_probabilities(eps: f64, eta: f64) -> Result<(f64, f64)> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return param(format!("epsilon must be finite and >= 0, got {eps}"));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return param(format!("efficiency must lie in (0, 1], got {eta}"));
    }
    let rho = Matrix2::new(1.0, 0.0, 0.0, eps) / (1.0 + eps);
    let pi1 = Matrix2::new(eta, 0.0, 0.0, 0.0);
    let pi2 = Matrix2::new(0.0, 0.0, 0.0, eta);
    Ok(((pi1 * rho).trace(), (pi2 * rho).trace()))
}

/// Simulates `trials` independent photons and estimates `ε` from the ratio
/// of clicks.
pub fn super_resolution_estimate(eps: f64, eta: f64, trials: u64, seed: u64) -> Result<SuperResolution> {
    if trials < MIN_TRIALS {
        return param(format!("need at least {MIN_TRIALS} trials, got {trials}"));
    }
    let (p1, p2) = super_resolution_probabilities(eps, eta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut n1, mut n2) = (0u64, 0u64);
    for _ in 0..trials {
        let u: f64 = rng.random();
        if u < p1 {
            n1 += 1;
        } else if u < p1 + p2 {
            n2 += 1;
        }
    }
    if n1 == 0 {
        return Err(Error::Numeric("no clicks on the strong mode; ratio undefined".into()));
    }
    let estimate = n2 as f64 / n1 as f64;
    let stderr = if n2 > 0 {
        estimate * (1.0 / n1 as f64 + 1.0 / n2 as f64).sqrt()
    } else {
        1.0 / n1 as f64
    };
    Ok(SuperResolution {
        p1,
        p2,
        n1,
        n2,
        estimate,
        stderr,
    })
}
