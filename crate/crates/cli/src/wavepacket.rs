use pdk::spectral::TimeGrid;
use pdk::wavepacket::{
    forward_amplitude, inverse_design, round_trip_error, GaussianPulse, InverseDesign, InverseOptions,
    RetrodictiveAmplitude, TargetWavepacket,
};
use serde::Deserialize;
use serde_json::json;

use crate::config::{load, RunArgs};
use crate::failure::Outcome;
use crate::output::OutDir;

/// Photon wavepacket the trigger is designed for.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    Gaussian {
        t0: f64,
        sigma: f64,
        #[serde(default)]
        omega0: f64,
    },
    /// Pulse orthogonal to the Gaussian `base`, with a gap of half-width
    /// `z` and smoothing width `s`.
    Orthogonal { base: GaussianPulse, z: f64, s: f64 },
    /// Tabulated amplitude and phase.
    Samples {
        t: Vec<f64>,
        amplitude: Vec<f64>,
        phase: Vec<f64>,
    },
}

impl TargetConfig {
    /// The Gaussian itself, or the base of an orthogonal pulse.
    pub fn pulse(&self) -> Option<GaussianPulse> {
        match self {
            TargetConfig::Gaussian { t0, sigma, omega0 } => Some(GaussianPulse {
                t0: *t0,
                sigma: *sigma,
                omega0: *omega0,
            }),
            TargetConfig::Orthogonal { base, .. } => Some(*base),
            TargetConfig::Samples { .. } => None,
        }
    }

    /// Samples on `t0 ± half_width·σ` with `points` points; tabulated
    /// targets keep their own grid.
    pub fn build(&self, half_width: f64, points: usize) -> Outcome<TargetWavepacket> {
        let grid = |p: &GaussianPulse| p.grid(half_width, points);
        Ok(match self {
            TargetConfig::Gaussian { .. } => {
                let pulse = self.pulse().expect("gaussian target has a pulse");
                TargetWavepacket::gaussian(pulse, grid(&pulse)?)?
            }
            TargetConfig::Orthogonal { base, z, s } => TargetWavepacket::orthogonal_pulse(*base, *z, *s, grid(base)?)?,
            TargetConfig::Samples { t, amplitude, phase } => {
                TargetWavepacket::from_samples(TimeGrid::new(t.clone())?, amplitude.clone(), phase.clone())?
            }
        })
    }
}

/// Window parameters shared with the `povm` command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerConfig {
    pub target: TargetConfig,
    pub detection_time: f64,
    /// Half-width of the time window in pulse widths.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_min_weight")]
    pub min_weight: f64,
}

fn default_half_width() -> f64 {
    10.0
}

fn default_points() -> usize {
    4001
}

fn default_min_weight() -> f64 {
    InverseOptions::default().min_weight
}

pub struct Trigger {
    pub target: TargetWavepacket,
    pub design: InverseDesign,
    pub amplitude: RetrodictiveAmplitude,
}

impl TriggerConfig {
    pub fn run(&self, points_override: Option<usize>) -> Outcome<Trigger> {
        let target = self
            .target
            .build(self.half_width, points_override.unwrap_or(self.points))?;
        let opts = InverseOptions {
            min_weight: self.min_weight,
            ..InverseOptions::default()
        };
        let design = inverse_design(&target, self.detection_time, opts)?;
        let amplitude = forward_amplitude(&design.schedule)?;
        Ok(Trigger {
            target,
            design,
            amplitude,
        })
    }
}

/// Closed-form decay rate `A²/(∫_{−∞}^t A² + ∫_T^∞ A²)` for a Gaussian.
fn analytic_kappa(p: &GaussianPulse, t: f64, big_t: f64) -> f64 {
    p.amplitude(t).powi(2) / (p.mass_before(t) + p.mass_after(big_t))
}

pub fn run(args: &RunArgs) -> Outcome<()> {
    let cfg: TriggerConfig = load(&args.config)?;
    let trig = cfg.run(args.grid_points)?;
    let sched = &trig.design.schedule;
    let t = sched.grid().points();
    let analytic: Option<Vec<f64>> = match &cfg.target {
        TargetConfig::Gaussian { .. } => {
            let pulse = cfg.target.pulse().expect("gaussian target has a pulse");
            Some(
                t.iter()
                    .map(|&x| analytic_kappa(&pulse, x, cfg.detection_time))
                    .collect(),
            )
        }
        _ => None,
    };

    let out = OutDir::create(&args.out)?;
    let mut header = vec!["t", "kappa", "detuning"];
    if analytic.is_some() {
        header.push("kappa_analytic");
    }
    out.csv(
        "schedule.csv",
        &header,
        (0..t.len()).map(|i| {
            let mut row = vec![Some(t[i]), Some(sched.kappa()[i]), Some(sched.detuning()[i])];
            if let Some(a) = &analytic {
                row.push(Some(a[i]));
            }
            row
        }),
    )?;
    let psi = &trig.amplitude.psi;
    out.csv(
        "amplitude.csv",
        &["t", "psi_re", "psi_im", "psi_abs2"],
        psi.points()
            .iter()
            .zip(psi.values())
            .map(|(&x, v)| vec![Some(x), Some(v.re), Some(v.im), Some(v.norm_sqr())]),
    )?;

    let mut report = json!({
        "detection_time": cfg.detection_time,
        "window_start": sched.start(),
        "weight": trig.amplitude.weight,
        "achievable_weight": trig.design.achievable_weight,
        "mass_before_window": trig.target.tail_before,
        "norm_defect": trig.amplitude.norm_defect,
        "round_trip_error": round_trip_error(&trig.target, &trig.amplitude)?,
        "warnings": trig.design.warnings,
    });
    if let Some(a) = &analytic {
        let peak = a.iter().cloned().fold(0.0, f64::max);
        let err = sched
            .kappa()
            .iter()
            .zip(a)
            .map(|(k, e)| (k - e).abs())
            .fold(0.0, f64::max);
        report["kappa_max_abs_error"] = json!(err);
        report["kappa_error_over_peak"] = json!(err / peak);
    }
    if let TargetConfig::Orthogonal { base, .. } = &cfg.target {
        let points = args.grid_points.unwrap_or(cfg.points);
        let g = TargetWavepacket::gaussian(*base, base.grid(cfg.half_width, points)?)?;
        let overlap = g
            .conjugate_amplitude()?
            .inner(&trig.target.conjugate_amplitude()?)?
            .norm();
        report["base_overlap"] = json!(overlap);
    }
    out.json("report.json", &report)
}
