//! The time-dependent two-level trigger.
//!
//! A trigger with decay `κ(t)` and detuning `Δ(t)`, switched on over the
//! window `[T₀, T]`, clicks at `T` with the retrodictive amplitude
//! `Ψ*(t) = √κ(t) exp(−∫_t^T (κ/2 + iΔ))`. The photon it detects best is
//! `Ψ(t)/√𝒲` with weight `𝒲 = 1 − exp(−∫κ)`. [`inverse_design`] runs
//! the map backwards: from a target `Ψ* = A e^{iφ}` it finds
//! `κ = A²/(1 − ∫_t^T A²)` and `Δ = dφ/dt`.

mod design;
mod families;
mod target;

use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::spectral::{
    fourier, quadrature, FourierOptions, Grid, Sampled, SpectralFunction, TemporalFunction, TimeGrid,
};

pub use design::{inverse_design, round_trip_error, InverseDesign, InverseOptions};
pub use families::{polynomial_decay, windowed_polynomial_decay};
pub use target::{GaussianPulse, TargetWavepacket};

/// Decay `κ(t) ≥ 0` and detuning `Δ(t)` sampled on the detector window,
/// which runs from the first grid point `T₀` to the last, `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSchedule {
    grid: TimeGrid,
    kappa: Vec<f64>,
    detuning: Vec<f64>,
}

impl CouplingSchedule {
    pub fn new(grid: TimeGrid, kappa: Vec<f64>, detuning: Vec<f64>) -> Result<Self> {
        if kappa.len() != grid.len() || detuning.len() != grid.len() {
            return param("schedule arrays must match the grid length");
        }
        if let Some(i) = kappa.iter().position(|k| !(*k >= 0.0) || !k.is_finite()) {
            return param(format!(
                "decay rate must be finite and >= 0, got {} at t = {}",
                kappa[i],
                grid.points()[i]
            ));
        }
        if let Some(i) = detuning.iter().position(|d| !d.is_finite()) {
            return param(format!("detuning is not finite at t = {}", grid.points()[i]));
        }
        Ok(CouplingSchedule { grid, kappa, detuning })
    }

    /// Same `κ` and `Δ` at every point.
    pub fn constant(grid: TimeGrid, kappa: f64, detuning: f64) -> Result<Self> {
        let n = grid.len();
        CouplingSchedule::new(grid, vec![kappa; n], vec![detuning; n])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn detuning(&self) -> &[f64] {
        &self.detuning
    }

    /// `T₀`.
    pub fn start(&self) -> f64 {
        self.grid.first()
    }

    /// `T`, the detection time.
    pub fn detection_time(&self) -> f64 {
        self.grid.last()
    }

    /// `∫_{T₀}^{T} κ`.
    pub fn integrated_decay(&self) -> f64 {
        quadrature::integrate(self.grid.points(), &self.kappa)
    }
}

/// `Ψ(t)` and its weight `𝒲 = ∫|Ψ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrodictiveAmplitude {
    /// `Ψ(t)`; the detector projects onto the photon `Ψ/√𝒲`.
    pub psi: TemporalFunction,
    /// `1 − exp(−∫κ)`.
    pub weight: f64,
    /// `|∫|Ψ|² − 𝒲|`, a quadrature consistency check.
    pub norm_defect: f64,
}

impl RetrodictiveAmplitude {
    /// `Ψ*(t)`.
    pub fn conjugate(&self) -> TemporalFunction {
        self.psi.conj()
    }

    /// The normalized detected mode `Ψ/√𝒲`.
    pub fn mode(&self) -> Result<TemporalFunction> {
        if !(self.weight > 0.0) {
            return Err(Error::Parameter("zero-weight amplitude has no detected mode".into()));
        }
        Ok(self.psi.scaled(Complex64::new(self.weight.sqrt().recip(), 0.0)))
    }
}

/// `Ψ(t)` from closed-form exponentials of cumulative integrals.
pub fn forward_amplitude(sched: &CouplingSchedule) -> Result<RetrodictiveAmplitude> {
    let t = sched.grid.points();
    let mut k_tail = quadrature::cumulative_from_right(t, &sched.kappa);
    // High-order panels can overshoot on spiky κ; the integral of κ ≥ 0
    // cannot decrease away from T.
    for i in (0..t.len() - 1).rev() {
        k_tail[i] = k_tail[i].max(k_tail[i + 1]);
    }
    let d_tail = quadrature::cumulative_from_right(t, &sched.detuning);
    let values: Vec<Complex64> = (0..t.len())
        .map(|i| {
            let mag = sched.kappa[i].sqrt() * (-0.5 * k_tail[i]).exp();
            Complex64::from_polar(mag, d_tail[i])
        })
        .collect();
    let psi = Sampled::new(sched.grid.clone(), values)?;
    let weight = -(-k_tail[0]).exp_m1();
    let norm_defect = (psi.norm_sqr_integral() - weight).abs();
    Ok(RetrodictiveAmplitude {
        psi,
        weight,
        norm_defect,
    })
}

/// Click probability `|∫Ψ* f|² = 𝒲|⟨Ψ_T|f⟩|²` for a photon `f` on the
/// amplitude's grid.
pub fn detection_probability(photon: &TemporalFunction, amp: &RetrodictiveAmplitude) -> Result<f64> {
    let overlap = amp.psi.inner(photon)?;
    Ok(overlap.norm_sqr())
}

/// [`detection_probability`] after cubic resampling of the photon onto the
/// amplitude's grid (zero outside the photon's grid).
pub fn detection_probability_resampled(photon: &TemporalFunction, amp: &RetrodictiveAmplitude) -> Result<f64> {
    detection_probability(&photon.resample(amp.psi.grid())?, amp)
}

/// Normalized trigger spectrum `Ψ̃ = FT[Ψ/√𝒲]` with time measured from the
/// detection time, so that `Ψ̃ e^{iωT}` is the absolute-time spectrum.
///
/// The mode is resampled onto `points` uniform samples of spacing `step`
/// centred on the window, zero outside it; the spectrum's grid is centred
/// on `center` with spacing `2π/(points·step)`.
pub fn trigger_spectrum(
    amp: &RetrodictiveAmplitude,
    step: f64,
    points: usize,
    center: f64,
) -> Result<SpectralFunction> {
    let mode = amp.mode()?;
    let (t0, big_t) = (mode.grid().first(), mode.grid().last());
    let span = big_t - t0;
    if !(step > 0.0) || (points as f64 - 1.0) * step < span * 1.1 {
        return Err(Error::Grid(format!(
            "spectrum window of {points} x {step} does not cover the detector window of length {span}"
        )));
    }
    let relative = Sampled::new(mode.grid().shifted(-big_t)?, mode.values().to_vec())?;
    let window = Grid::centered(-0.5 * span, step, points)?;
    let padded = relative.resample(&window)?;
    fourier::forward(
        &padded,
        FourierOptions {
            center,
            leakage_threshold: 1e-6,
        },
    )?
    .normalized()
}
