use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::spectral::{fourier, quadrature, FourierOptions, Grid, Sampled, SpectralFunction};

/// Probability mass the bins must capture.
pub const COVERAGE: f64 = 1.0 - 1e-8;

/// Entropic widths `ΔX = 2^{H_X} δX` in frequency and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub delta_omega: f64,
    pub delta_t: f64,
    pub bin_omega: f64,
    pub bin_t: f64,
    pub entropy_omega: f64,
    pub entropy_t: f64,
    pub product: f64,
}

/// Shannon entropy (bits) of a density binned at multiples of `bin`.
///
/// Bin masses are differences of the running integral, interpolated at
/// the bin edges.
pub fn binned_entropy(x: &[f64], density: &[f64], bin: f64) -> Result<f64> {
    if !(bin > 0.0) || !bin.is_finite() {
        return param(format!("bin size must be positive, got {bin}"));
    }
    let cdf = quadrature::cumulative(x, density);
    let total = cdf[cdf.len() - 1];
    if total < COVERAGE {
        return Err(Error::Coverage {
            tail: 1.0 - total,
            tolerance: 1.0 - COVERAGE,
        });
    }
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let first = (lo / bin).floor() as i64;
    let last = (hi / bin).ceil() as i64;
    let at = |e: f64| {
        if e <= lo {
            0.0
        } else if e >= hi {
            total
        } else {
            quadrature::interpolate(x, &cdf, e)
        }
    };
    let mut h = 0.0;
    let mut prev = at(first as f64 * bin);
    for k in first + 1..=last {
        let next = at(k as f64 * bin);
        let p = (next - prev) / total;
        if p > 0.0 {
            h -= p * p.log2();
        }
        prev = next;
    }
    Ok(h)
}

/// Time-domain densities of several spectra on a common time window,
/// centred on their combined weight.
fn time_densities(states: &[(f64, &SpectralFunction)], leakage: f64) -> Result<(Grid, Vec<f64>)> {
    let first: Vec<Sampled> = states
        .iter()
        .map(|(_, s)| {
            fourier::inverse(
                s,
                FourierOptions {
                    center: 0.0,
                    leakage_threshold: leakage,
                },
            )
        })
        .collect::<Result<_>>()?;
    let t = first[0].points();
    let period = (t[t.len() - 1] - t[0]) * t.len() as f64 / (t.len() - 1) as f64;
    let (mut sn, mut cs) = (0.0, 0.0);
    for ((w, _), f) in states.iter().zip(&first) {
        for (ti, v) in t.iter().zip(f.values()) {
            let a = 2.0 * PI * ti / period;
            sn += w * v.norm_sqr() * a.sin();
            cs += w * v.norm_sqr() * a.cos();
        }
    }
    let center = if sn == 0.0 && cs == 0.0 {
        0.0
    } else {
        sn.atan2(cs) * period / (2.0 * PI)
    };
    let opts = FourierOptions {
        center,
        leakage_threshold: leakage,
    };
    let mut grid = None;
    let mut density = vec![0.0; t.len()];
    for (w, s) in states {
        let f = fourier::inverse(s, opts)?;
        for (d, v) in density.iter_mut().zip(f.values()) {
            *d += w * v.norm_sqr();
        }
        grid.get_or_insert_with(|| f.grid().clone());
    }
    Ok((grid.expect("at least one state"), density))
}

/// Entropic uncertainties of a mixture `Σ w_i|f_i⟩⟨f_i|` of normalized
/// spectra on a shared uniform frequency grid.
pub fn entropic_uncertainty_mixture(
    states: &[(f64, &SpectralFunction)],
    bin_omega: f64,
    bin_t: f64,
) -> Result<UncertaintyReport> {
    if states.is_empty() {
        return param("need at least one state");
    }
    let total: f64 = states.iter().map(|(w, _)| w).sum();
    if !(total > 0.0) || states.iter().any(|(w, _)| !(*w >= 0.0)) {
        return param("mixture weights must be >= 0 with a positive sum");
    }
    for (_, s) in &states[1..] {
        states[0].1.require_same_grid(s)?;
    }
    let norm: Vec<(f64, &SpectralFunction)> = states.iter().map(|(w, s)| (w / total, *s)).collect();
    let grid = norm[0].1.grid().clone();
    let mut spec_density = vec![0.0; grid.len()];
    for (w, s) in &norm {
        for (d, v) in spec_density.iter_mut().zip(s.values()) {
            *d += w * v.norm_sqr();
        }
    }
    let h_omega = binned_entropy(grid.points(), &spec_density, bin_omega)?;
    // Spectra already sit on a finite grid; accept any edge magnitude.
    let (tgrid, t_density) = time_densities(&norm, f64::INFINITY)?;
    let h_t = binned_entropy(tgrid.points(), &t_density, bin_t)?;
    let delta_omega = h_omega.exp2() * bin_omega;
    let delta_t = h_t.exp2() * bin_t;
    Ok(UncertaintyReport {
        delta_omega,
        delta_t,
        bin_omega,
        bin_t,
        entropy_omega: h_omega,
        entropy_t: h_t,
        product: delta_omega * delta_t,
    })
}

/// Entropic uncertainties of one normalized spectrum.
pub fn entropic_uncertainty(state: &SpectralFunction, bin_omega: f64, bin_t: f64) -> Result<UncertaintyReport> {
    entropic_uncertainty_mixture(&[(1.0, state)], bin_omega, bin_t)
}
