use num_complex::Complex64;

use super::chain::HUGE;
use super::spec::{degenerate, DiscreteState};
use super::{Amplitudes, Transmission};
use crate::error::{param, Error, Result};

/// Relative tolerance on the decay ratio `Γ_i/γ_i` being uniform.
pub const RATIO_RTOL: f64 = 1e-12;

/// Uncoupled states with a uniform decay ratio `Γ_i = k γ_i`.
///
/// With `h = Σ γ_i/(2Δ_i)`,
/// `R = (i − (k−1)h)/(i − (k+1)h)` and `T = −2i√k h/(1 + i(k+1)h)`.
/// Both are evaluated in terms of `u = 1/h`, which is finite (zero) at the
/// resonances, so exact resonances give the analytic limit
/// `R = (k−1)/(k+1)`, `T = −2√k/(k+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelNetwork {
    omegas: Vec<f64>,
    gammas: Vec<f64>,
    k: f64,
}

impl ParallelNetwork {
    /// States must satisfy `gamma_out = k·gamma_in`.
    pub fn unbalanced(states: &[DiscreteState], k: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        if !(k > 0.0) || !k.is_finite() {
            return param(format!("decay ratio k must be positive, got {k}"));
        }
        for (i, s) in states.iter().enumerate() {
            if !(s.gamma_in > 0.0) || !s.gamma_in.is_finite() || !s.omega.is_finite() {
                return param(format!("state {i}: gamma_in must be positive and finite"));
            }
            if s.mu != 0.0 {
                return Err(Error::Spec(format!(
                    "state {i}: the parallel closed form has no side channel"
                )));
            }
            let expected = k * s.gamma_in;
            if (s.gamma_out - expected).abs() > RATIO_RTOL * expected {
                return Err(Error::Spec(format!(
                    "state {i}: gamma_out/gamma_in = {} differs from k = {k}",
                    s.gamma_out / s.gamma_in
                )));
            }
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                if degenerate(states[i].omega, states[j].omega) {
                    return Err(Error::Spec(format!(
                        "states {i} and {j} are degenerate at {}",
                        states[i].omega
                    )));
                }
            }
        }
        Ok(ParallelNetwork {
            omegas: states.iter().map(|s| s.omega).collect(),
            gammas: states.iter().map(|s| s.gamma_in).collect(),
            k,
        })
    }

    /// Identical decays `γ`, `Γ` for every state.
    pub fn homogeneous(omegas: &[f64], gamma: f64, big_gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && big_gamma > 0.0) {
            return param("homogeneous parallel network needs gamma, Gamma > 0");
        }
        let states: Vec<DiscreteState> = omegas
            .iter()
            .map(|&w| DiscreteState::new(w, gamma, big_gamma))
            .collect();
        ParallelNetwork::unbalanced(&states, big_gamma / gamma)
    }

    /// Infers `k` from the first state.
    pub fn from_states(states: &[DiscreteState]) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyNetwork)?;
        if !(first.gamma_in > 0.0) {
            return param("parallel states need gamma_in > 0");
        }
        ParallelNetwork::unbalanced(states, first.gamma_out / first.gamma_in)
    }

    pub fn ratio(&self) -> f64 {
        self.k
    }

    /// `Σ 2γ_iΓ_i/(γ_i+Γ_i)`, the sum of the individual bandwidths.
    pub fn bandwidth(&self) -> f64 {
        let k = self.k;
        self.gammas.iter().map(|g| 2.0 * k * g / (1.0 + k)).sum()
    }

    /// `u = 1/h`; zero at an exact resonance, huge where `h` vanishes.
    fn inverse_response(&self, omega: f64) -> f64 {
        let mut h = 0.0;
        for (&w, &g) in self.omegas.iter().zip(&self.gammas) {
            let delta = omega - w;
            if delta == 0.0 {
                return 0.0;
            }
            h += g / (2.0 * delta);
        }
        if h == 0.0 {
            HUGE
        } else {
            1.0 / h
        }
    }
}

impl Transmission for ParallelNetwork {
    fn amplitudes(&self, omega: f64) -> Result<Amplitudes> {
        let k = self.k;
        let u = self.inverse_response(omega);
        let iu = Complex64::new(0.0, u);
        Ok(Amplitudes {
            r: (iu - (k - 1.0)) / (iu - (k + 1.0)),
            t: -2.0 * k.sqrt() / ((k + 1.0) - iu),
            side: Complex64::new(0.0, 0.0),
        })
    }
}
