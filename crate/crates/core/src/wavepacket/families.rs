use super::CouplingSchedule;
use crate::error::{param, Result};
use crate::spectral::TimeGrid;

fn check(kappa0: f64, sigma: f64) -> Result<()> {
    if !(kappa0 >= 0.0) || !(sigma > 0.0) || !kappa0.is_finite() || !sigma.is_finite() {
        return param("polynomial decay needs kappa0 >= 0 and sigma > 0");
    }
    Ok(())
}

/// `κ(t) = κ₀((T − t)/σ)ⁿ` with `Δ = 0`; the coupling switches off at
/// the detection time.
pub fn polynomial_decay(kappa0: f64, sigma: f64, n: i32, grid: TimeGrid) -> Result<CouplingSchedule> {
    check(kappa0, sigma)?;
    let big_t = grid.last();
    let kappa = grid
        .points()
        .iter()
        .map(|&t| kappa0 * ((big_t - t) / sigma).powi(n))
        .collect();
    let len = grid.len();
    CouplingSchedule::new(grid, kappa, vec![0.0; len])
}

/// `κ(t) = κ₀((t − T₀)/σ)ⁿ((T − t)/σ)ⁿ` with `Δ = 0`; the coupling
/// vanishes at both window edges.
pub fn windowed_polynomial_decay(kappa0: f64, sigma: f64, n: i32, grid: TimeGrid) -> Result<CouplingSchedule> {
    check(kappa0, sigma)?;
    let (t0, big_t) = (grid.first(), grid.last());
    let kappa = grid
        .points()
        .iter()
        .map(|&t| kappa0 * ((t - t0) / sigma).powi(n) * ((big_t - t) / sigma).powi(n))
        .collect();
    let len = grid.len();
    CouplingSchedule::new(grid, kappa, vec![0.0; len])
}
