use serde::Serialize;

use super::series::SeriesNetwork;
use super::Transmission;
use crate::error::{param, Error, Result};

/// Critical parameters for perfect transmission through two states in
/// series, with the verification evaluated through the series model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStateDesign {
    pub omega_star: f64,
    pub g: f64,
    /// `|T(ω*)|²` from the series evaluation.
    pub transmission: f64,
}

/// Frequency `ω*` and coupling `g₁₂` giving `R(ω*) = 0` for two states
/// with input decay `γ` on the first and output decay `Γ` on the second.
///
/// `R = 0` requires `γΔ₂ = ΓΔ₁` and `g² = Δ₁Δ₂ + γΓ/4`, which give
/// `ω* = (Γω₁ − γω₂)/(Γ − γ)` and
/// `g² = γΓ/4 + γΓ(ω₁ − ω₂)²/(Γ − γ)²`. Balanced decays only admit the
/// degenerate solution `ω₁ = ω₂`, where `g = √(γΓ)/2`.
pub fn design_two_state_series(omega1: f64, omega2: f64, gamma: f64, big_gamma: f64) -> Result<TwoStateDesign> {
    if !(gamma > 0.0 && big_gamma > 0.0) || !gamma.is_finite() || !big_gamma.is_finite() {
        return param(format!("decays must be positive (gamma={gamma}, Gamma={big_gamma})"));
    }
    if !omega1.is_finite() || !omega2.is_finite() {
        return param("resonances must be finite");
    }
    let (omega_star, g2) = if gamma == big_gamma {
        if omega1 != omega2 {
            return Err(Error::Infeasible(
                "balanced decays with detuned states: the critical coupling is infinite".into(),
            ));
        }
        (omega1, 0.25 * gamma * big_gamma)
    } else {
        let diff = big_gamma - gamma;
        let w = (big_gamma * omega1 - gamma * omega2) / diff;
        let split = (omega1 - omega2) / diff;
        (w, gamma * big_gamma * (0.25 + split * split))
    };
    if !(g2 >= 0.0) || !g2.is_finite() {
        return Err(Error::Infeasible(format!("critical coupling squared is {g2}")));
    }
    let g = g2.sqrt();
    let net = SeriesNetwork::new(vec![omega1, omega2], gamma, big_gamma, vec![g])?;
    let t = net.amplitudes(omega_star)?.t.norm_sqr();
    if (t - 1.0).abs() > 1e-9 {
        return Err(Error::Numeric(format!(
            "designed network transmits |T|^2 = {t} at omega*"
        )));
    }
    Ok(TwoStateDesign {
        omega_star,
        g,
        transmission: t,
    })
}
