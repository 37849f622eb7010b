//! Input-independent figures of merit of a transmission function:
//! spectral bandwidth, group delay and group-delay-induced dispersion.

use std::f64::consts::PI;

use super::function::Sampled;
use super::grid::Grid;
use super::quadrature;
use crate::error::{Error, Result};

/// Default `|T|` below which the phase is treated as undefined.
pub const PHASE_FLOOR: f64 = 1e-8;
/// Default tail-mass tolerance for integrals over the grid support.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Real-valued profile with points where the quantity is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub grid: Grid,
    pub values: Vec<Option<f64>>,
}

impl Profile {
    pub fn at(&self, i: usize) -> Option<f64> {
        self.values[i]
    }

    /// Maximal runs of consecutive defined points, as half-open ranges.
    pub fn runs(&self) -> Vec<std::ops::Range<usize>> {
        defined_runs(&self.values)
    }
}

fn defined_runs<T>(values: &[Option<T>]) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, v) in values.iter().enumerate() {
        match (v.is_some(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(s..values.len());
    }
    runs
}

/// `(1/π) ∫ |T(ω)|² dω` over the grid.
///
/// Fails with [`Error::Coverage`] when the tails beyond the grid ends,
/// estimated as `|T_end|² · (distance to the spectral median)` per side
/// (exact for `1/ω²` tails), exceed `tail_tolerance` of the total.
pub fn spectral_bandwidth_with(t: &Sampled, tail_tolerance: f64) -> Result<f64> {
    let p = t.norm_sqr();
    if let Some(i) = p.iter().position(|&v| v > 1.0 + 1e-9) {
        return Err(Error::Parameter(format!(
            "|T|² = {} > 1 at omega = {}",
            p[i],
            t.points()[i]
        )));
    }
    let x = t.points();
    let cum = quadrature::cumulative(x, &p);
    let total = cum[cum.len() - 1];
    if total <= 0.0 {
        return Ok(0.0);
    }
    let median = x[cum.partition_point(|&c| c < 0.5 * total).min(x.len() - 1)];
    let n = x.len();
    let tail = p[0] * (median - x[0]).abs() + p[n - 1] * (x[n - 1] - median).abs();
    if tail > tail_tolerance * total {
        return Err(Error::Coverage {
            tail: tail / total,
            tolerance: tail_tolerance,
        });
    }
    Ok(total / PI)
}

/// [`spectral_bandwidth_with`] at the default tail tolerance.
pub fn spectral_bandwidth(t: &Sampled) -> Result<f64> {
    spectral_bandwidth_with(t, TAIL_TOLERANCE)
}

/// Transmission phase `½·unwrap(arg T²)`, undefined where `|T| < floor`.
///
/// Squaring before unwrapping removes the sign flips of `T` at real
/// transmission zeros, which 2π-unwrapping alone cannot.
pub fn unwrapped_phase(t: &Sampled, floor: f64) -> Profile {
    let mut values = Vec::with_capacity(t.len());
    let mut prev: Option<f64> = None;
    for v in t.values() {
        if v.norm() < floor {
            values.push(None);
            continue;
        }
        let raw = (v * v).arg();
        let unwrapped = match prev {
            None => raw,
            Some(p) => raw + 2.0 * PI * ((p - raw) / (2.0 * PI)).round(),
        };
        prev = Some(unwrapped);
        values.push(Some(0.5 * unwrapped));
    }
    Profile {
        grid: t.grid().clone(),
        values,
    }
}

/// Phase advance between the first and last defined points.
pub fn accumulated_phase(t: &Sampled, floor: f64) -> Option<f64> {
    let phase = unwrapped_phase(t, floor);
    let first = phase.values.iter().flatten().next()?;
    let last = phase.values.iter().rev().flatten().next()?;
    Some(last - first)
}

/// Five-point derivative of a profile within each run of defined points.
fn profile_derivative(p: &Profile) -> Profile {
    let x = p.grid.points();
    let mut out = vec![None; x.len()];
    for run in p.runs() {
        if run.len() < 2 {
            continue;
        }
        let xs = &x[run.clone()];
        let ys: Vec<f64> = p.values[run.clone()].iter().map(|v| v.unwrap()).collect();
        let d = quadrature::derivative(xs, &ys, 5);
        for (k, i) in run.enumerate() {
            out[i] = Some(d[k]);
        }
    }
    Profile {
        grid: p.grid.clone(),
        values: out,
    }
}

/// Group delay `τ_g = dφ/dω` by five-point differences on the unwrapped
/// phase. Points with `|T| < floor` are undefined, never zero.
pub fn group_delay_with(t: &Sampled, floor: f64) -> Profile {
    profile_derivative(&unwrapped_phase(t, floor))
}

pub fn group_delay(t: &Sampled) -> Profile {
    group_delay_with(t, PHASE_FLOOR)
}

/// `𝒯_g = ∫ |dτ_g/dω| |T|² dω`, integrated over each run of defined delay.
pub fn dispersion_metric_with(t: &Sampled, floor: f64) -> Result<f64> {
    let tau = group_delay_with(t, floor);
    let slope = profile_derivative(&tau);
    let x = t.points();
    let p = t.norm_sqr();
    let mut total = 0.0;
    for run in slope.runs() {
        if run.len() < 2 {
            continue;
        }
        let xs = &x[run.clone()];
        let ys: Vec<f64> = run.clone().map(|i| slope.values[i].unwrap().abs() * p[i]).collect();
        total += quadrature::integrate(xs, &ys);
    }
    if !total.is_finite() {
        return Err(Error::Numeric("dispersion integral is not finite".into()));
    }
    Ok(total)
}

pub fn dispersion_metric(t: &Sampled) -> Result<f64> {
    dispersion_metric_with(t, PHASE_FLOOR)
}

/// Largest `| |T|² + |R|² − 1 |` over the grid.
pub fn unitarity_defect(t: &Sampled, r: &Sampled) -> Result<f64> {
    t.require_same_grid(r)?;
    Ok(t.values()
        .iter()
        .zip(r.values())
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max))
}
