use num_complex::Complex64;

use super::chain::chain_amplitudes;
use super::spec::{NetworkSpec, Topology};
use super::{Amplitudes, Transmission};
use crate::error::{Error, Result};

/// Nearest-neighbour chain from the input continuum (first state) to the
/// output continuum (last state), evaluated with Wallis–Euler recurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesNetwork {
    omegas: Vec<f64>,
    gamma: f64,
    big_gamma: f64,
    /// `g[k]` couples states `k` and `k+1`.
    g: Vec<f64>,
}

impl SeriesNetwork {
    pub fn new(omegas: Vec<f64>, gamma: f64, big_gamma: f64, g: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        if g.len() + 1 != omegas.len() {
            return Err(Error::Spec(format!(
                "{} states need {} couplings, got {}",
                omegas.len(),
                omegas.len() - 1,
                g.len()
            )));
        }
        if !(gamma > 0.0) || !(big_gamma >= 0.0) || !gamma.is_finite() || !big_gamma.is_finite() {
            return Err(Error::Parameter(format!(
                "series decays need gamma > 0 and Gamma >= 0 (gamma={gamma}, Gamma={big_gamma})"
            )));
        }
        if g.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) || omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::Parameter("couplings must be >= 0 and resonances finite".into()));
        }
        Ok(SeriesNetwork {
            omegas,
            gamma,
            big_gamma,
            g,
        })
    }

    /// `n` identical states at `omega0` with uniform coupling `g`.
    pub fn uniform(n: usize, omega0: f64, gamma: f64, big_gamma: f64, g: f64) -> Result<Self> {
        SeriesNetwork::new(vec![omega0; n], gamma, big_gamma, vec![g; n.saturating_sub(1)])
    }

    pub fn from_spec(spec: &NetworkSpec) -> Result<Self> {
        if spec.topology != Topology::Series {
            return Err(Error::Spec("series closed form needs a series topology".into()));
        }
        spec.validate()?;
        if spec.has_side_channel() {
            return Err(Error::Spec("the series closed form has no side channel".into()));
        }
        let n = spec.len();
        let g = (0..n - 1).map(|k| spec.coupling(k, k + 1)).collect();
        SeriesNetwork::new(
            spec.states.iter().map(|s| s.omega).collect(),
            spec.states[0].gamma_in,
            spec.states[n - 1].gamma_out,
            g,
        )
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

impl Transmission for SeriesNetwork {
    fn amplitudes(&self, omega: f64) -> Result<Amplitudes> {
        let n = self.omegas.len();
        let diag: Vec<Complex64> = self
            .omegas
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                let mut re = 0.0;
                if k == 0 {
                    re += 0.5 * self.gamma;
                }
                if k == n - 1 {
                    re += 0.5 * self.big_gamma;
                }
                Complex64::new(re, -(omega - w))
            })
            .collect();
        let (r, t) = chain_amplitudes(omega, &diag, &self.g, self.gamma.sqrt(), self.big_gamma.sqrt())?;
        Ok(Amplitudes {
            r,
            t,
            side: Complex64::new(0.0, 0.0),
        })
    }
}
