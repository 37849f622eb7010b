use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{param, Result};
use crate::spectral::{quadrature, Sampled, TemporalFunction, TimeGrid};

/// Desired retrodictive amplitude `Ψ*(t) = A(t) e^{iφ(t)}`.
///
/// `A` is normalized so that the sampled mass plus the analytic mass
/// outside the grid (`tail_before`, `tail_after`) is one. The photon the
/// designed detector is matched to is `A e^{−iφ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetWavepacket {
    grid: TimeGrid,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
    pub tail_before: f64,
    pub tail_after: f64,
}

/// Gaussian pulse centred at `t0` with intensity width `sigma` and
/// carrier detuning `omega0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    pub t0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub omega0: f64,
}

impl GaussianPulse {
    /// `(2πσ²)^{−1/4} e^{−(t−t0)²/(4σ²)}`.
    pub fn amplitude(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.sigma;
        (2.0 * PI * self.sigma * self.sigma).powf(-0.25) * (-0.25 * x * x).exp()
    }

    /// `ω₀(t − t₀)`, so the detuning is `ω₀`.
    pub fn phase(&self, t: f64) -> f64 {
        self.omega0 * (t - self.t0)
    }

    /// `∫_{−∞}^{t} A²`.
    pub fn mass_before(&self, t: f64) -> f64 {
        0.5 * erfc((self.t0 - t) / (SQRT_2 * self.sigma))
    }

    /// `∫_{t}^{∞} A²`.
    pub fn mass_after(&self, t: f64) -> f64 {
        0.5 * erfc((t - self.t0) / (SQRT_2 * self.sigma))
    }

    /// Uniform grid `t0 ± half_width·σ` with `n` points.
    pub fn grid(&self, half_width: f64, n: usize) -> Result<TimeGrid> {
        TimeGrid::uniform(self.t0 - half_width * self.sigma, self.t0 + half_width * self.sigma, n)
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() || !self.t0.is_finite() || !self.omega0.is_finite() {
            return param("Gaussian pulse needs finite t0, omega0 and sigma > 0");
        }
        Ok(())
    }
}

impl TargetWavepacket {
    /// Arbitrary samples; `A` is normalized on the grid and no mass is
    /// assumed outside it.
    pub fn from_samples(grid: TimeGrid, amplitude: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        if amplitude.len() != grid.len() || phase.len() != grid.len() {
            return param("target arrays must match the grid length");
        }
        if amplitude.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return param("target amplitude must be finite and >= 0");
        }
        if phase.iter().any(|p| !p.is_finite()) {
            return param("target phase must be finite");
        }
        let sq: Vec<f64> = amplitude.iter().map(|a| a * a).collect();
        let norm = quadrature::integrate(grid.points(), &sq);
        if !(norm > 0.0) {
            return param("target amplitude vanishes");
        }
        let s = norm.sqrt().recip();
        Ok(TargetWavepacket {
            grid,
            amplitude: amplitude.iter().map(|a| a * s).collect(),
            phase,
            tail_before: 0.0,
            tail_after: 0.0,
        })
    }

    /// Gaussian samples with analytic tails beyond the grid.
    pub fn gaussian(pulse: GaussianPulse, grid: TimeGrid) -> Result<Self> {
        pulse.validate()?;
        let t = grid.points();
        Ok(TargetWavepacket {
            amplitude: t.iter().map(|&x| pulse.amplitude(x)).collect(),
            phase: t.iter().map(|&x| pulse.phase(x)).collect(),
            tail_before: pulse.mass_before(grid.first()),
            tail_after: pulse.mass_after(grid.last()),
            grid,
        })
    }

    /// Approximate first-order Hermite-Gaussian, exactly orthogonal to
    /// the Gaussian `base` on a grid symmetric about `base.t0`.
    ///
    /// The lobes of `|HG₁|` are pushed apart so the amplitude vanishes for
    /// `|t − t₀| < z`; the phase ramps from 0 to π over
    /// `|t − t₀| ≤ z − s` (a step when `z = s`). Both are then smoothed by
    /// a triangular kernel of full width `s`, after which the phase is
    /// flat wherever the amplitude is non-zero and the overlap with the
    /// even Gaussian cancels pairwise.
    pub fn orthogonal_pulse(base: GaussianPulse, z: f64, s: f64, grid: TimeGrid) -> Result<Self> {
        base.validate()?;
        if !(s > 0.0) || !(z >= s) || !z.is_finite() {
            return param(format!("orthogonal pulse needs z >= s > 0 (z={z}, s={s})"));
        }
        let h = grid
            .uniform_step(1e-9)
            .ok_or_else(|| crate::Error::Grid("orthogonal pulse needs a uniform grid".into()))?;
        let t = grid.points();
        let sigma = base.sigma;
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        let raw_amp: Vec<f64> = t
            .iter()
            .map(|&x| {
                let r = (x - base.t0).abs() - z;
                if r <= 0.0 {
                    0.0
                } else {
                    norm * (r / sigma) * (-0.25 * (r / sigma).powi(2)).exp()
                }
            })
            .collect();
        let ramp = z - s;
        let raw_phase: Vec<f64> = t
            .iter()
            .map(|&x| {
                let u = x - base.t0;
                if ramp == 0.0 {
                    if u < 0.0 {
                        0.0
                    } else if u > 0.0 {
                        PI
                    } else {
                        0.5 * PI
                    }
                } else {
                    PI * ((u + ramp) / (2.0 * ramp)).clamp(0.0, 1.0)
                }
            })
            .collect();
        let amp = triangle_smooth(&raw_amp, h, s, 0.0);
        let step = triangle_smooth(&raw_phase, h, s, f64::NAN);
        let phase = t.iter().zip(&step).map(|(&x, p)| base.phase(x) + p).collect();
        TargetWavepacket::from_samples(grid, amp, phase)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    /// Samples of `Ψ* = A e^{iφ}`.
    pub fn conjugate_amplitude(&self) -> Result<TemporalFunction> {
        let v = self
            .amplitude
            .iter()
            .zip(&self.phase)
            .map(|(&a, &p)| Complex64::from_polar(a, p))
            .collect();
        Sampled::new(self.grid.clone(), v)
    }

    /// The matched photon `A e^{−iφ}`.
    pub fn photon(&self) -> Result<TemporalFunction> {
        Ok(self.conjugate_amplitude()?.conj())
    }

    /// Interpolated `A` and `φ` at `t`.
    pub fn sample_at(&self, t: f64) -> (f64, f64) {
        let x = self.grid.points();
        (
            quadrature::interpolate(x, &self.amplitude, t).max(0.0),
            quadrature::interpolate(x, &self.phase, t),
        )
    }
}

/// Convolution with a unit-area triangle of full width `s` on a uniform
/// grid. Outside the grid the signal is `pad`, or the nearest edge value
/// when `pad` is NaN.
fn triangle_smooth(y: &[f64], h: f64, s: f64, pad: f64) -> Vec<f64> {
    let half = 0.5 * s;
    let m = (half / h).ceil() as isize;
    let kernel: Vec<f64> = (-m..=m).map(|j| (1.0 - (j as f64 * h).abs() / half).max(0.0)).collect();
    let total: f64 = kernel.iter().sum();
    let n = y.len() as isize;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                let j = i + k as isize - m;
                let v = if (0..n).contains(&j) {
                    y[j as usize]
                } else if pad.is_nan() {
                    y[j.clamp(0, n - 1) as usize]
                } else {
                    pad
                };
                acc += w * v;
            }
            acc / total
        })
        .collect()
}
