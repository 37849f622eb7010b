use pdk::network::{design_two_state_series, find_perfect_transmission, model_for, PEAK_TOLERANCE};
use pdk::povm::{mode_matched_design, TRANSMISSION_FLOOR};
use pdk::spectral::{Grid, SpectralFunction};
use pdk::Complex64;
use serde::Deserialize;
use serde_json::json;

use crate::config::{load, GridConfig, NetworkConfig, RunArgs};
use crate::failure::{Failure, Outcome};
use crate::output::OutDir;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoState {
    omega1: f64,
    omega2: f64,
    gamma: f64,
    big_gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Peaks {
    network: NetworkConfig,
    grid: GridConfig,
    #[serde(default = "default_peak_tolerance")]
    tolerance: f64,
}

fn default_peak_tolerance() -> f64 {
    PEAK_TOLERANCE
}

/// Gaussian photon spectrum centred on `omega0` with intensity standard
/// deviation `width`, arriving around `t0`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralTarget {
    omega0: f64,
    width: f64,
    #[serde(default)]
    t0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeMatching {
    network: NetworkConfig,
    target: SpectralTarget,
    /// Uniform grid `omega0 ± half_width·width`.
    #[serde(default = "default_half_width")]
    half_width: f64,
    #[serde(default = "default_points")]
    points: usize,
    detection_time: f64,
    #[serde(default = "default_floor")]
    floor: f64,
}

fn default_half_width() -> f64 {
    10.0
}

fn default_points() -> usize {
    4001
}

fn default_floor() -> f64 {
    TRANSMISSION_FLOOR
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    two_state: Option<TwoState>,
    #[serde(default)]
    peaks: Option<Peaks>,
    #[serde(default)]
    mode_matching: Option<ModeMatching>,
}

pub fn run(args: &RunArgs) -> Outcome<()> {
    let cfg: Config = load(&args.config)?;
    if cfg.two_state.is_none() && cfg.peaks.is_none() && cfg.mode_matching.is_none() {
        return Err(Failure::config("design config needs two_state, peaks or mode_matching"));
    }
    let mut report = json!({});
    let mut matched = None;

    if let Some(c) = &cfg.two_state {
        let d = design_two_state_series(c.omega1, c.omega2, c.gamma, c.big_gamma)?;
        report["two_state"] = json!({
            "omega_star": d.omega_star,
            "g": d.g,
            "t_abs2": d.transmission,
            "t_abs": d.transmission.sqrt(),
        });
    }
    if let Some(c) = &cfg.peaks {
        let spec = c.network.build(args.base_dir())?;
        let grid = c.grid.build(&spec, args.grid_points)?;
        let model = model_for(&spec)?;
        let res = model.transfer(&grid)?;
        let peaks = find_perfect_transmission(&res, Some(model.as_ref()), c.tolerance);
        report["peaks"] = json!({ "count": peaks.len(), "omega": peaks });
    }
    if let Some(c) = &cfg.mode_matching {
        let spec = c.network.build(args.base_dir())?;
        let tgt = &c.target;
        if tgt.width.is_nan() || tgt.width <= 0.0 {
            return Err(Failure::config("target width must be positive"));
        }
        let points = args.grid_points.unwrap_or(c.points);
        let span = c.half_width * tgt.width;
        let grid = Grid::uniform(tgt.omega0 - span, tgt.omega0 + span, points)?;
        let target = SpectralFunction::from_fn(&grid, |w| {
            let x = (w - tgt.omega0) / tgt.width;
            Complex64::from_polar((-0.25 * x * x).exp(), w * tgt.t0)
        })?;
        let t = model_for(&spec)?.transfer(&grid)?.t;
        let d = mode_matched_design(&target, &t, c.detection_time, c.floor)?;
        report["mode_matching"] = json!({ "efficiency_ratio": d.efficiency_ratio, "points": points });
        matched = Some(d.psi_tilde);
    }

    let out = OutDir::create(&args.out)?;
    if let Some(psi) = matched {
        let rows = (0..psi.len()).map(|i| {
            let v = psi.values()[i];
            vec![Some(psi.points()[i]), Some(v.re), Some(v.im), Some(v.norm_sqr())]
        });
        out.csv("matched_trigger.csv", &["omega", "re", "im", "abs2"], rows)?;
    }
    out.json("design.json", &report)
}
