use pdk::network::{find_perfect_transmission, model_for, DirectSolver, Transmission, PEAK_TOLERANCE};
use pdk::spectral::{accumulated_phase, dispersion_metric, group_delay, spectral_bandwidth, Grid, PHASE_FLOOR};
use serde::Deserialize;
use serde_json::json;

use crate::config::{load, network_features, GridConfig, NetworkConfig, RunArgs};
use crate::failure::Outcome;
use crate::output::OutDir;

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Solver {
    /// Closed form where the topology has one, direct solve otherwise.
    #[default]
    Auto,
    Direct,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metrics {
    #[serde(default = "yes")]
    enabled: bool,
    /// Half-width of the metric grid in units of the widest feature.
    #[serde(default = "default_span")]
    span: f64,
    #[serde(default = "default_resolution")]
    resolution: f64,
}

impl Default for Metrics {
    fn default() -> Self {
        Metrics {
            enabled: true,
            span: default_span(),
            resolution: default_resolution(),
        }
    }
}

fn yes() -> bool {
    true
}

fn default_span() -> f64 {
    1e9
}

fn default_resolution() -> f64 {
    1e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    network: NetworkConfig,
    grid: GridConfig,
    #[serde(default)]
    solver: Solver,
    #[serde(default = "default_peak_tolerance")]
    peak_tolerance: f64,
    #[serde(default)]
    metrics: Metrics,
}

fn default_peak_tolerance() -> f64 {
    PEAK_TOLERANCE
}

pub fn run(args: &RunArgs) -> Outcome<()> {
    let cfg: Config = load(&args.config)?;
    let spec = cfg.network.build(args.base_dir())?;
    let grid = cfg.grid.build(&spec, args.grid_points)?;
    let model: Box<dyn Transmission> = match cfg.solver {
        Solver::Auto => model_for(&spec)?,
        Solver::Direct => Box::new(DirectSolver::new(&spec)?),
    };
    let result = model.transfer(&grid)?;
    let out = OutDir::create(&args.out)?;

    let delay = group_delay(&result.t);
    let mut header = vec!["omega", "t_re", "t_im", "r_re", "r_im", "t_abs2", "r_abs2"];
    if result.side.is_some() {
        header.push("side_abs2");
    }
    header.push("group_delay");
    let rows = (0..grid.len()).map(|i| {
        let (t, r) = (result.t.values()[i], result.r.values()[i]);
        let mut row = vec![Some(grid.points()[i]), Some(t.re), Some(t.im), Some(r.re), Some(r.im)];
        row.extend([Some(t.norm_sqr()), Some(r.norm_sqr())]);
        if let Some(side) = &result.side {
            row.push(Some(side.values()[i].norm_sqr()));
        }
        row.push(delay.at(i));
        row
    });
    out.csv("spectrum.csv", &header, rows)?;

    let peaks = find_perfect_transmission(&result, Some(model.as_ref()), cfg.peak_tolerance);
    let peak_rows = peaks.iter().map(|&w| {
        let p = model.amplitudes(w).map(|a| a.t.norm_sqr()).ok();
        vec![Some(w), p]
    });
    out.csv("peaks.csv", &["omega", "t_abs2"], peak_rows)?;

    let mut report = json!({
        "states": spec.states.len(),
        "grid_points": grid.len(),
        "flux_defect": result.flux_defect(),
        "perfect_transmission_count": peaks.len(),
        "perfect_transmission": peaks,
    });
    if cfg.metrics.enabled {
        report["metrics"] = metrics(&spec, model.as_ref(), &cfg.metrics)?;
    }
    out.json("report.json", &report)
}

/// Bandwidth, dispersion and accumulated phase on a wide adaptive grid.
/// A metric that is undefined for the network is reported as null with
/// the reason.
fn metrics(spec: &pdk::network::NetworkSpec, model: &dyn Transmission, m: &Metrics) -> Outcome<serde_json::Value> {
    let features = network_features(spec);
    let widest = features.iter().map(|f| f.1).fold(0.0, f64::max);
    let lo = features.iter().map(|f| f.0).fold(f64::INFINITY, f64::min) - m.span * widest;
    let hi = features.iter().map(|f| f.0).fold(f64::NEG_INFINITY, f64::max) + m.span * widest;
    let grid = Grid::adaptive(&features, lo, hi, m.resolution)?;
    let t = model.transfer(&grid)?.t;
    let mut notes = Vec::new();
    let mut keep = |name: &str, r: pdk::Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    };
    let bandwidth = keep("bandwidth", spectral_bandwidth(&t));
    let dispersion = keep("dispersion", dispersion_metric(&t));
    let phase = accumulated_phase(&t, PHASE_FLOOR);
    if phase.is_none() {
        notes.push("accumulated_phase: |T| falls below the phase floor".into());
    }
    Ok(json!({
        "grid_points": grid.len(),
        "lo": lo,
        "hi": hi,
        "bandwidth": bandwidth,
        "dispersion": dispersion,
        "accumulated_phase": phase,
        "notes": notes,
    }))
}
