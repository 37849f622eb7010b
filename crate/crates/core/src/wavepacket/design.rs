use num_complex::Complex64;

use super::target::TargetWavepacket;
use super::{CouplingSchedule, RetrodictiveAmplitude};
use crate::error::{param, Error, Result};
use crate::spectral::{quadrature, Sampled, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseOptions {
    /// Smallest accepted `∫_{T₀}^{T} A²`; below it the target is deemed to
    /// extend past the detection time.
    pub min_weight: f64,
    /// Floor on the denominator `1 − ∫_t^T A²`.
    pub denominator_floor: f64,
    /// Largest accepted second difference of `φ` (rad) where `A` is
    /// non-negligible.
    pub max_phase_curvature: f64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            min_weight: 0.5,
            denominator_floor: 1e-12,
            max_phase_curvature: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseDesign {
    pub schedule: CouplingSchedule,
    /// `∫_{T₀}^{T} A²`, the weight an ideal forward run achieves.
    pub achievable_weight: f64,
    pub warnings: Vec<String>,
}

/// `κ(t) = A²/(1 − ∫_t^T A²)` and `Δ = dφ/dt` on `[T₀, T]`, where `T₀`
/// is the first grid point of the target.
///
/// The denominator is assembled from the mass before `t` and the mass
/// after `T` rather than as a difference from one, so it keeps full
/// relative accuracy when it is tiny.
pub fn inverse_design(target: &TargetWavepacket, detection_time: f64, opts: InverseOptions) -> Result<InverseDesign> {
    let grid = target.grid();
    let big_t = detection_time;
    if !(big_t > grid.first()) || big_t > grid.last() || !big_t.is_finite() {
        return param(format!(
            "detection time {big_t} must lie in ({}, {}]",
            grid.first(),
            grid.last()
        ));
    }
    check_smoothness(target, opts.max_phase_curvature)?;

    let x = grid.points();
    let amp = target.amplitude();
    let phase = target.phase();
    let cut = x.partition_point(|&t| t < big_t);
    let mut times: Vec<f64> = x[..cut].to_vec();
    let mut a: Vec<f64> = amp[..cut].to_vec();
    let mut p: Vec<f64> = phase[..cut].to_vec();
    let (a_t, p_t) = if cut < x.len() && x[cut] == big_t {
        (amp[cut], phase[cut])
    } else {
        target.sample_at(big_t)
    };
    times.push(big_t);
    a.push(a_t);
    p.push(p_t);
    if times.len() < 5 {
        return param("window holds fewer than 5 target samples");
    }

    let a2: Vec<f64> = a.iter().map(|v| v * v).collect();
    let before = quadrature::cumulative(&times, &a2);
    let achievable = before[before.len() - 1];
    if achievable < opts.min_weight {
        return Err(Error::InfeasibleWindow(format!(
            "target extends past T: only {achievable:.6} of its mass arrives before T = {big_t} (minimum {})",
            opts.min_weight
        )));
    }
    // Mass after T: remaining grid plus analytic tail.
    let mut after_t = target.tail_after;
    if cut < x.len() {
        let mut xs = vec![big_t];
        let mut ys = vec![a_t * a_t];
        for i in cut..x.len() {
            if x[i] > big_t {
                xs.push(x[i]);
                ys.push(amp[i] * amp[i]);
            }
        }
        if xs.len() >= 2 {
            after_t += quadrature::integrate(&xs, &ys);
        }
    }

    let mut warnings = Vec::new();
    let mut capped = 0usize;
    let kappa: Vec<f64> = (0..times.len())
        .map(|i| {
            let mut d = target.tail_before + before[i] + after_t;
            if d < opts.denominator_floor {
                d = opts.denominator_floor;
                capped += 1;
            }
            a2[i] / d
        })
        .collect();
    if capped > 0 {
        warnings.push(format!(
            "denominator below {:e} at {capped} points; decay rate capped there",
            opts.denominator_floor
        ));
    }
    let detuning = quadrature::derivative(&times, &p, 5);
    let schedule = CouplingSchedule::new(TimeGrid::new(times)?, kappa, detuning)?;
    Ok(InverseDesign {
        schedule,
        achievable_weight: achievable,
        warnings,
    })
}

fn check_smoothness(target: &TargetWavepacket, limit: f64) -> Result<()> {
    let a = target.amplitude();
    let p = target.phase();
    let x = target.grid().points();
    let peak = a.iter().cloned().fold(0.0, f64::max);
    for i in 1..p.len() - 1 {
        if a[i] > 1e-8 * peak && (p[i + 1] - 2.0 * p[i] + p[i - 1]).abs() > limit {
            return Err(Error::Smoothness { time: x[i] });
        }
    }
    Ok(())
}

/// L2 distance between the forward amplitude `Ψ*` and the target
/// `A e^{iφ}` over the detector window, after removing one global phase
/// fixed at the target's amplitude maximum.
pub fn round_trip_error(target: &TargetWavepacket, amp: &RetrodictiveAmplitude) -> Result<f64> {
    let got = amp.conjugate();
    let grid = got.grid();
    let want = Sampled::from_fn(grid, |t| {
        let (a, p) = target.sample_at(t);
        Complex64::from_polar(a, p)
    })?;
    let peak = want
        .values()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (g, w) = (got.values()[peak], want.values()[peak]);
    let align = if g.norm() > 0.0 && w.norm() > 0.0 {
        Complex64::from_polar(1.0, w.arg() - g.arg())
    } else {
        Complex64::new(1.0, 0.0)
    };
    let diff = Sampled::new(
        grid.clone(),
        got.values()
            .iter()
            .zip(want.values())
            .map(|(g, w)| g * align - w)
            .collect(),
    )?;
    Ok(diff.norm_sqr_integral().sqrt())
}
