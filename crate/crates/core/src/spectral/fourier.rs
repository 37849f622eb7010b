//! Discrete realisation of `f̃(ω) = (2π)^{-1/2} ∫ f(t) e^{iωt} dt`.
//!
//! A uniform time grid of `N` points with spacing `dt` pairs with a
//! uniform frequency grid of `N` points with spacing `dω = 2π/(N dt)`.
//! Forward and inverse are exact inverses of each other (a unitary DFT
//! with phase factors for the grid origins), so round trips are limited
//! only by rounding.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::function::Sampled;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Options shared by both transform directions.
#[derive(Debug, Clone, Copy)]
pub struct FourierOptions {
    /// Centre of the output grid (frequency for forward, time for inverse).
    pub center: f64,
    /// Largest allowed endpoint magnitude relative to the peak.
    pub leakage_threshold: f64,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions {
            center: 0.0,
            leakage_threshold: 1e-6,
        }
    }
}

const UNIFORM_RTOL: f64 = 1e-9;

fn check_input(f: &Sampled, threshold: f64) -> Result<f64> {
    let step = f
        .grid()
        .uniform_step(UNIFORM_RTOL)
        .ok_or_else(|| Error::Grid("Fourier transform needs a uniform grid".into()))?;
    let peak = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        let ends = f.values()[0].norm().max(f.values()[f.len() - 1].norm());
        let ratio = ends / peak;
        if ratio > threshold {
            return Err(Error::Leakage { ratio, threshold });
        }
    }
    Ok(step)
}

/// Output grid of `n` points with spacing `step` whose index `n/2` sits at
/// `center`.
fn output_grid(center: f64, step: f64, n: usize) -> Result<Grid> {
    let start = center - (n / 2) as f64 * step;
    Grid::new((0..n).map(|k| start + k as f64 * step).collect())
}

/// Time → frequency.
pub fn forward(f: &Sampled, opts: FourierOptions) -> Result<Sampled> {
    let dt = check_input(f, opts.leakage_threshold)?;
    let n = f.len();
    let t0 = f.grid().first();
    let dw = 2.0 * PI / (n as f64 * dt);
    let omega = output_grid(opts.center, dw, n)?;
    let w0 = omega.first();

    let mut buf: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(1.0, w0 * j as f64 * dt))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

    let scale = dt / (2.0 * PI).sqrt();
    let values = omega
        .points()
        .iter()
        .zip(buf)
        .map(|(&w, s)| s * Complex64::from_polar(scale, w * t0))
        .collect();
    Sampled::new(omega, values)
}

/// Frequency → time.
pub fn inverse(spec: &Sampled, opts: FourierOptions) -> Result<Sampled> {
    let dw = check_input(spec, opts.leakage_threshold)?;
    let n = spec.len();
    let w0 = spec.grid().first();
    let dt = 2.0 * PI / (n as f64 * dw);
    let times = output_grid(opts.center, dt, n)?;
    let t0 = times.first();

    let mut buf: Vec<Complex64> = spec
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, -(k as f64) * dw * t0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let scale = dw / (2.0 * PI).sqrt();
    let values = times
        .points()
        .iter()
        .zip(buf)
        .map(|(&t, s)| s * Complex64::from_polar(scale, -w0 * t))
        .collect();
    Sampled::new(times, values)
}

/// Inverse transform whose time window is centred on the pulse.
///
/// The discrete inverse is periodic in time, so the pulse is located with
/// a circular mean of `|f(t)|²` on a first pass and the window is then
/// recentred on it.
pub fn inverse_centered(spec: &Sampled, leakage_threshold: f64) -> Result<Sampled> {
    let first = inverse(
        spec,
        FourierOptions {
            center: 0.0,
            leakage_threshold,
        },
    )?;
    let t = first.points();
    let period = (t[t.len() - 1] - t[0]) * t.len() as f64 / (t.len() - 1) as f64;
    let (mut s, mut c) = (0.0, 0.0);
    for (ti, v) in t.iter().zip(first.values()) {
        let p = v.norm_sqr();
        let angle = 2.0 * PI * ti / period;
        s += p * angle.sin();
        c += p * angle.cos();
    }
    let center = if s == 0.0 && c == 0.0 {
        0.0
    } else {
        s.atan2(c) * period / (2.0 * PI)
    };
    inverse(
        spec,
        FourierOptions {
            center,
            leakage_threshold,
        },
    )
}
