use pdk::amplification::{
    monte_carlo_ideal, output_variance, sweep_point, thermal_occupation, thermal_occupation_at, AmplifierKind,
    AmplifierScheme, NumberStats, PhysicalConstants,
};
use serde::Deserialize;
use serde_json::json;

use crate::config::{load, RunArgs};
use crate::failure::{Failure, Outcome};
use crate::output::OutDir;

const KINDS: [AmplifierKind; 6] = [
    AmplifierKind::LinearPhaseInsensitive,
    AmplifierKind::LinearPhaseSensitive,
    AmplifierKind::SingleMode,
    AmplifierKind::GModes,
    AmplifierKind::MultiStepSingleMode,
    AmplifierKind::MultiStepMultiMode,
];

const SAMPLED: [AmplifierKind; 2] = [AmplifierKind::SingleMode, AmplifierKind::GModes];

/// Thermal occupation of the reservoir modes.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Reservoir {
    Thermal {
        nbar: f64,
    },
    /// `ħ = k_B = 1`.
    Temperature {
        omega: f64,
        kt: f64,
    },
    /// Angular frequency in rad/s and temperature in kelvin.
    TemperatureSi {
        omega: f64,
        kelvin: f64,
    },
}

impl Reservoir {
    fn nbar(&self) -> Outcome<f64> {
        Ok(match self {
            Reservoir::Thermal { nbar } => *nbar,
            Reservoir::Temperature { omega, kt } => thermal_occupation(*omega, *kt, &PhysicalConstants::NATURAL)?,
            Reservoir::TemperatureSi { omega, kelvin } => {
                thermal_occupation_at(*omega, *kelvin, &PhysicalConstants::SI)?
            }
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonteCarlo {
    samples: usize,
    /// Sampling stops above this gain.
    #[serde(default = "default_max_gain")]
    max_gain: u64,
    #[serde(default)]
    source_quanta: Option<u64>,
}

fn default_max_gain() -> u64 {
    1024
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    gains: Vec<f64>,
    #[serde(default = "default_n_a")]
    n_a: u64,
    /// Per-step gain of the cascades; absent means one step of the full gain.
    #[serde(default)]
    step_gain: Option<f64>,
    reservoir: Reservoir,
    #[serde(default)]
    monte_carlo: Option<MonteCarlo>,
    #[serde(default)]
    seed: Option<u64>,
}

fn default_n_a() -> u64 {
    1
}

fn as_integer(x: f64) -> Option<u64> {
    (x >= 1.0 && x.fract() == 0.0 && x < 2f64.powi(53)).then_some(x as u64)
}

/// Number of cascade steps `N` with `g^N = G`, if there is one.
fn steps(gain: f64, g: f64) -> Option<u32> {
    if g == gain {
        return Some(1);
    }
    let n = (gain.ln() / g.ln()).round();
    ((1.0..64.0).contains(&n) && (g.powi(n as i32) - gain).abs() <= 1e-12 * gain).then_some(n as u32)
}

/// The scheme of `kind` at total gain `gain`, or `None` where the kind
/// cannot realize it (fractional nonlinear gain, gain not a power of `g`).
fn scheme(kind: AmplifierKind, gain: f64, g: Option<f64>) -> Option<AmplifierScheme> {
    if kind.is_multi_step() {
        let g = g.unwrap_or(gain);
        AmplifierScheme::multi_step(kind, g, steps(gain, g)?).ok()
    } else {
        AmplifierScheme::new(kind, gain).ok()
    }
}

pub fn run(args: &RunArgs) -> Outcome<()> {
    let cfg: Config = load(&args.config)?;
    if cfg.gains.is_empty() {
        return Err(Failure::config("gains must not be empty"));
    }
    if let Some(g) = cfg.step_gain {
        AmplifierScheme::multi_step(AmplifierKind::MultiStepSingleMode, g, 1)?;
    }
    let seed = args.seed(cfg.seed);
    let nbar = cfg.reservoir.nbar()?;
    let reservoir = NumberStats::thermal(nbar)?;
    let input = NumberStats::fock(cfg.n_a as f64)?;

    let mut header = vec!["G".to_string()];
    for k in KINDS {
        header.push(format!("{}_variance", k.name()));
        header.push(format!("{}_snr", k.name()));
    }
    if cfg.monte_carlo.is_some() {
        for k in SAMPLED {
            for col in ["mean", "variance", "variance_stderr", "z"] {
                header.push(format!("mc_{}_{col}", k.name()));
            }
        }
    }

    let mut rows = Vec::with_capacity(cfg.gains.len());
    let mut max_z: f64 = 0.0;
    let mut sampled_rows = 0usize;
    for (i, &gain) in cfg.gains.iter().enumerate() {
        let mut row = vec![Some(gain)];
        for k in KINDS {
            match scheme(k, gain, cfg.step_gain) {
                Some(s) => {
                    let p = sweep_point(&s, cfg.n_a, reservoir)?;
                    row.push(Some(p.variance));
                    row.push(Some(p.snr.unwrap_or(f64::INFINITY)));
                }
                None => row.extend([None, None]),
            }
        }
        if let Some(mc) = &cfg.monte_carlo {
            let integer = as_integer(gain).filter(|&g| g <= mc.max_gain);
            if integer.is_some() {
                sampled_rows += 1;
            }
            for (j, k) in SAMPLED.into_iter().enumerate() {
                let Some(g) = integer else {
                    row.extend([None; 4]);
                    continue;
                };
                let stats = monte_carlo_ideal(
                    k,
                    g,
                    cfg.n_a,
                    nbar,
                    mc.samples,
                    seed.wrapping_add(2 * i as u64 + j as u64),
                    mc.source_quanta,
                )?;
                let expected = output_variance(&AmplifierScheme::new(k, gain)?, input, reservoir)?;
                let z = if stats.variance_stderr > 0.0 {
                    (stats.variance - expected) / stats.variance_stderr
                } else if stats.variance == expected {
                    0.0
                } else {
                    f64::INFINITY
                };
                max_z = max_z.max(z.abs());
                row.extend([
                    Some(stats.mean),
                    Some(stats.variance),
                    Some(stats.variance_stderr),
                    Some(z),
                ]);
            }
        }
        rows.push(row);
    }

    let out = OutDir::create(&args.out)?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("sweep.csv", &header, rows)?;
    let mut report = json!({
        "n_a": cfg.n_a,
        "nbar": nbar,
        "step_gain": cfg.step_gain,
        "rows": cfg.gains.len(),
        "seed": seed,
    });
    if let Some(mc) = &cfg.monte_carlo {
        report["monte_carlo"] = json!({
            "samples": mc.samples,
            "rows_sampled": sampled_rows,
            "max_abs_z": max_z,
        });
    }
    out.json("report.json", &report)
}
