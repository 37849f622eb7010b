//! Photon-number amplification: closed-form output variances and
//! signal-to-noise ratios for linear and nonlinear schemes, thermal
//! occupations, and a Monte-Carlo oracle for the ideal nonlinear maps.

mod monte_carlo;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

pub use monte_carlo::{monte_carlo_ideal, MonteCarloStats, MIN_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplifierKind {
    LinearPhaseInsensitive,
    LinearPhaseSensitive,
    /// `|n⟩_a|m⟩_b → |n⟩_a|m + Gn⟩_b`.
    SingleMode,
    /// One excitation per photon into each of `G` reservoir modes.
    GModes,
    /// `N` single-mode steps of gain `g`.
    MultiStepSingleMode,
    /// `N` steps, each copying every excitation into `g` fresh modes.
    MultiStepMultiMode,
}

impl AmplifierKind {
    pub const ALL: [AmplifierKind; 6] = [
        AmplifierKind::LinearPhaseInsensitive,
        AmplifierKind::LinearPhaseSensitive,
        AmplifierKind::SingleMode,
        AmplifierKind::GModes,
        AmplifierKind::MultiStepSingleMode,
        AmplifierKind::MultiStepMultiMode,
    ];

    pub fn is_linear(self) -> bool {
        matches!(
            self,
            AmplifierKind::LinearPhaseInsensitive | AmplifierKind::LinearPhaseSensitive
        )
    }

    pub fn is_multi_step(self) -> bool {
        matches!(
            self,
            AmplifierKind::MultiStepSingleMode | AmplifierKind::MultiStepMultiMode
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            AmplifierKind::LinearPhaseInsensitive => "linear_phase_insensitive",
            AmplifierKind::LinearPhaseSensitive => "linear_phase_sensitive",
            AmplifierKind::SingleMode => "single_mode",
            AmplifierKind::GModes => "g_modes",
            AmplifierKind::MultiStepSingleMode => "multi_step_single_mode",
            AmplifierKind::MultiStepMultiMode => "multi_step_multi_mode",
        }
    }
}

/// Gain structure: total gain `G`, per-step gain `g` and step count `N`
/// with `G = g^N` (single-step kinds have `g = G`, `N = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifierScheme {
    pub kind: AmplifierKind,
    pub gain: f64,
    pub step_gain: f64,
    pub steps: u32,
}

fn is_integer(x: f64) -> bool {
    x.is_finite() && x.fract() == 0.0
}

impl AmplifierScheme {
    /// Single-step scheme of total gain `gain`.
    pub fn new(kind: AmplifierKind, gain: f64) -> Result<Self> {
        if kind.is_multi_step() {
            return param("multi-step kinds are built with AmplifierScheme::multi_step");
        }
        let s = AmplifierScheme {
            kind,
            gain,
            step_gain: gain,
            steps: 1,
        };
        s.validate()?;
        Ok(s)
    }

    /// `steps` stages of gain `step_gain`.
    pub fn multi_step(kind: AmplifierKind, step_gain: f64, steps: u32) -> Result<Self> {
        if !kind.is_multi_step() {
            return param("only multi-step kinds take a step count");
        }
        let s = AmplifierScheme {
            kind,
            gain: step_gain.powi(steps as i32),
            step_gain,
            steps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (g_tot, g, n) = (self.gain, self.step_gain, self.steps);
        if !(g_tot >= 1.0) || !g_tot.is_finite() {
            return param(format!("gain must be finite and >= 1, got {g_tot}"));
        }
        if !self.kind.is_linear() && !is_integer(g_tot) {
            return param(format!("{} needs an integer gain, got {g_tot}", self.kind.name()));
        }
        if self.kind.is_multi_step() {
            if !is_integer(g) || g < 2.0 || n < 1 {
                return param(format!(
                    "multi-step schemes need integer g >= 2 and N >= 1 (g={g}, N={n})"
                ));
            }
            if g.powi(n as i32) != g_tot {
                return param(format!("total gain {g_tot} differs from g^N = {}", g.powi(n as i32)));
            }
        } else if g != g_tot || n != 1 {
            return param("single-step schemes have g = G and N = 1");
        }
        Ok(())
    }
}

/// Mean and variance of an excitation number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberStats {
    pub mean: f64,
    pub variance: f64,
}

impl NumberStats {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(mean >= 0.0) || !(variance >= 0.0) || !mean.is_finite() || !variance.is_finite() {
            return param(format!(
                "number statistics must be finite and >= 0 (mean={mean}, variance={variance})"
            ));
        }
        Ok(NumberStats { mean, variance })
    }

    /// Fixed number `n`.
    pub fn fock(n: f64) -> Result<Self> {
        NumberStats::new(n, 0.0)
    }

    /// Thermal state: variance `N̄(N̄ + 1)`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        NumberStats::new(nbar, nbar * (nbar + 1.0))
    }
}

/// Output number variance of the amplified signal mode.
///
/// Multi-step reservoirs are independent with identical statistics.
pub fn output_variance(scheme: &AmplifierScheme, input: NumberStats, reservoir: NumberStats) -> Result<f64> {
    scheme.validate()?;
    let (big, g) = (scheme.gain, scheme.step_gain);
    let (va, vb) = (input.variance, reservoir.variance);
    let (na, nb) = (input.mean, reservoir.mean);
    Ok(match scheme.kind {
        AmplifierKind::LinearPhaseInsensitive => {
            big * big * va + (big - 1.0).powi(2) * vb + big * (big - 1.0) * (2.0 * na * nb + na + nb + 1.0)
        }
        AmplifierKind::LinearPhaseSensitive => {
            (6.0 * big * (big - 1.0) + 1.0) * va + 2.0 * big * (big - 1.0) * (na * na + na + 1.0)
        }
        AmplifierKind::SingleMode => vb + big * big * va,
        AmplifierKind::GModes => big * vb + big * big * va,
        AmplifierKind::MultiStepSingleMode => (big * big - 1.0) / (g * g - 1.0) * vb + big * big * va,
        AmplifierKind::MultiStepMultiMode => big * (big - 1.0) / (g - 1.0) * vb + big * big * va,
    })
}

/// Signal-to-noise ratio; linear amplifiers at unit gain add no noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Snr {
    Finite(f64),
    NoiseFree,
}

impl Snr {
    pub fn value(self) -> Option<f64> {
        match self {
            Snr::Finite(v) => Some(v),
            Snr::NoiseFree => None,
        }
    }
}

/// SNR for a Fock input of `n_a` photons and reservoir spread `Δn_b`.
///
/// The phase-sensitive value does not depend on `Δn_b`: it is the bound
/// for a reservoir-free linear amplifier, in units of `n_a` alone.
pub fn snr(scheme: &AmplifierScheme, n_a: u64, delta_nb: f64) -> Result<Snr> {
    scheme.validate()?;
    if !(delta_nb > 0.0) || !delta_nb.is_finite() {
        return param(format!("reservoir spread must be positive, got {delta_nb}"));
    }
    let (big, g) = (scheme.gain, scheme.step_gain);
    let na = n_a as f64;
    if scheme.kind.is_linear() && big == 1.0 {
        return Ok(Snr::NoiseFree);
    }
    Ok(Snr::Finite(match scheme.kind {
        AmplifierKind::LinearPhaseInsensitive => big / (big - 1.0) * na / delta_nb,
        AmplifierKind::LinearPhaseSensitive => (2.0 * big - 1.0) / (2.0 * big * (big - 1.0)).sqrt() * na,
        AmplifierKind::SingleMode => big * na / delta_nb,
        AmplifierKind::GModes => big.sqrt() * na / delta_nb,
        AmplifierKind::MultiStepSingleMode => big * (g * g - 1.0).sqrt() * na / ((big * big - 1.0).sqrt() * delta_nb),
        AmplifierKind::MultiStepMultiMode => (big * (g - 1.0)).sqrt() * na / ((big - 1.0).sqrt() * delta_nb),
    }))
}

/// `ħ` and `k_B` in the caller's unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    /// Natural units.
    pub const NATURAL: PhysicalConstants = PhysicalConstants { hbar: 1.0, k_b: 1.0 };
    /// SI: J·s and J/K, with angular frequency in rad/s.
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants::NATURAL
    }
}

/// Bose occupation `1/(e^{ħω/kT} − 1)` for thermal energy `kT`.
pub fn thermal_occupation(omega: f64, kt: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return param(format!("mode frequency must be positive, got {omega}"));
    }
    if !(kt >= 0.0) || !kt.is_finite() {
        return param(format!("thermal energy must be finite and >= 0, got {kt}"));
    }
    if kt == 0.0 {
        return Ok(0.0);
    }
    Ok((constants.hbar * omega / kt).exp_m1().recip())
}

/// [`thermal_occupation`] at absolute temperature `temperature`.
pub fn thermal_occupation_at(omega: f64, temperature: f64, constants: &PhysicalConstants) -> Result<f64> {
    thermal_occupation(omega, constants.k_b * temperature, constants)
}

/// One row of a gain sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub scheme: AmplifierKind,
    #[serde(rename = "G")]
    pub gain: f64,
    pub g: f64,
    #[serde(rename = "N")]
    pub steps: u32,
    pub variance: f64,
    /// `None` for a noise-free linear amplifier.
    pub snr: Option<f64>,
}

/// Evaluates `scheme` for a Fock input and the given reservoir.
pub fn sweep_point(scheme: &AmplifierScheme, n_a: u64, reservoir: NumberStats) -> Result<SweepPoint> {
    let input = NumberStats::fock(n_a as f64)?;
    let variance = output_variance(scheme, input, reservoir)?;
    let s = snr(scheme, n_a, reservoir.variance.sqrt())?;
    Ok(SweepPoint {
        scheme: scheme.kind,
        gain: scheme.gain,
        g: scheme.step_gain,
        steps: scheme.steps,
        variance,
        snr: s.value(),
    })
}
