use num_complex::Complex64;

use super::spec::DiscreteState;
use super::{Amplitudes, Transmission};
use crate::error::{param, Result};

/// One state between the input and output continua (a two-mirror cavity).
///
/// `T = −√(γΓ)/D`, `R = 1 − γ/D` with `D = (γ+Γ)/2 − iΔ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleModel {
    pub omega0: f64,
    pub gamma: f64,
    pub big_gamma: f64,
}

impl SimpleModel {
    /// Decays must be non-negative with `γ + Γ > 0`; `Γ = 0` is a pure
    /// reflector.
    pub fn new(omega0: f64, gamma: f64, big_gamma: f64) -> Result<Self> {
        if !omega0.is_finite() {
            return param("resonance must be finite");
        }
        if !(gamma >= 0.0 && big_gamma >= 0.0) || !(gamma + big_gamma > 0.0) || !(gamma + big_gamma).is_finite() {
            return param(format!(
                "decays must be finite, >= 0 and not both zero (gamma={gamma}, Gamma={big_gamma})"
            ));
        }
        Ok(SimpleModel {
            omega0,
            gamma,
            big_gamma,
        })
    }

    pub fn from_state(s: &DiscreteState) -> Result<Self> {
        if s.mu != 0.0 {
            return param("the simple closed form has no side channel");
        }
        SimpleModel::new(s.omega, s.gamma_in, s.gamma_out)
    }

    /// `2γΓ/(γ+Γ)`.
    pub fn bandwidth(&self) -> f64 {
        2.0 * self.gamma * self.big_gamma / (self.gamma + self.big_gamma)
    }

    /// On-resonance group delay `2/(γ+Γ)`.
    pub fn resonant_delay(&self) -> f64 {
        2.0 / (self.gamma + self.big_gamma)
    }

    /// `8γΓ/(γ+Γ)³`.
    pub fn dispersion(&self) -> f64 {
        8.0 * self.gamma * self.big_gamma / (self.gamma + self.big_gamma).powi(3)
    }
}

impl Transmission for SimpleModel {
    fn amplitudes(&self, omega: f64) -> Result<Amplitudes> {
        let d = Complex64::new(0.5 * (self.gamma + self.big_gamma), -(omega - self.omega0));
        Ok(Amplitudes {
            r: 1.0 - self.gamma / d,
            t: -(self.gamma * self.big_gamma).sqrt() / d,
            side: Complex64::new(0.0, 0.0),
        })
    }
}
