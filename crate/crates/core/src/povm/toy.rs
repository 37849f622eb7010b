use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{param, Result};
use crate::spectral::{quadrature, SpectralFunction};

/// Long-time weight function `|T(ω)|²`: the probability that a
/// monochromatic photon at `ω` is eventually detected.
pub fn toy_povm_long_time(t: &SpectralFunction) -> Vec<f64> {
    t.norm_sqr()
}

/// Probability that the filtered photon `T f̃` arrives during
/// `[start, start + window]`:
/// `(1/2π) ∫ dt |∫ T(ω) f̃(ω) e^{−iωt} dω|²`, by direct quadrature on
/// `time_points` uniform times.
pub fn toy_povm_probability(
    t: &SpectralFunction,
    input: &SpectralFunction,
    start: f64,
    window: f64,
    time_points: usize,
) -> Result<f64> {
    if !(window > 0.0) || !window.is_finite() {
        return param(format!("integration window must be positive, got {window}"));
    }
    if time_points < 6 {
        return param("need at least 6 time points");
    }
    let filtered = t.product(input)?;
    let w = filtered.points();
    let times: Vec<f64> = (0..time_points)
        .map(|k| start + window * k as f64 / (time_points - 1) as f64)
        .collect();
    let weighted: Vec<Complex64> = quadrature::node_weights(w)
        .iter()
        .zip(filtered.values())
        .map(|(q, v)| v * *q)
        .collect();
    let density: Vec<f64> = times
        .par_iter()
        .map(|&tm| {
            let amp: Complex64 = w
                .iter()
                .zip(&weighted)
                .map(|(&om, v)| v * Complex64::from_polar(1.0, -om * tm))
                .sum();
            amp.norm_sqr() / (2.0 * PI)
        })
        .collect();
    Ok(quadrature::integrate(&times, &density))
}

/// `∫|T|²|f̃|²`, the `window → ∞` limit of [`toy_povm_probability`].
pub fn toy_povm_limit(t: &SpectralFunction, input: &SpectralFunction) -> Result<f64> {
    Ok(t.product(input)?.norm_sqr_integral())
}
