//! Transmission and reflection of networks of discrete states.
//!
//! Every model solves the same linear input-output problem: amplitudes
//! `c` of the discrete states obey `(K + iG − iΔ) c = −√γ a_in`, with `K`
//! the dissipative coupling through the continua, `G` the coherent
//! couplings and `Δ_i = ω − ω_i`. Then `R = 1 + Σ√γ_i c_i`,
//! `T = Σ√Γ_i c_i` and the side-channel output is `Σ√μ_i c_i`. Closed
//! forms exist for the simple, parallel, series and hybrid topologies;
//! [`DirectSolver`] handles anything.

mod chain;
mod design;
mod direct;
mod hybrid;
mod parallel;
mod peaks;
mod series;
mod simple;
pub mod spec;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::spectral::{FrequencyGrid, Grid, Sampled, SpectralFunction};

pub use design::{design_two_state_series, TwoStateDesign};
pub use direct::DirectSolver;
pub use hybrid::{HybridMode, HybridNetwork};
pub use parallel::ParallelNetwork;
pub use peaks::{find_perfect_transmission, PEAK_TOLERANCE};
pub use series::SeriesNetwork;
pub use simple::SimpleModel;
pub use spec::{Coupling, DiscreteState, NetworkSpec, Topology};

/// Output amplitudes at one frequency for unit input amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub r: Complex64,
    pub t: Complex64,
    /// Amplitude into the side continuum (zero without side channels).
    pub side: Complex64,
}

/// `T(ω)`, `R(ω)` and, for lossy networks, the side-channel map.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub t: SpectralFunction,
    pub r: SpectralFunction,
    pub side: Option<SpectralFunction>,
}

impl TransferResult {
    pub fn grid(&self) -> &Grid {
        self.t.grid()
    }

    /// Largest `| |T|² + |R|² + |D|² − 1 |` over the grid.
    pub fn flux_defect(&self) -> f64 {
        let side = self.side.as_ref().map(|s| s.norm_sqr());
        (0..self.t.len())
            .map(|i| {
                let d = side.as_ref().map_or(0.0, |s| s[i]);
                (self.t.values()[i].norm_sqr() + self.r.values()[i].norm_sqr() + d - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|R*T + RT*|`, which vanishes for lossless mirror-symmetric networks.
    pub fn orthogonality_defect(&self) -> f64 {
        self.t
            .values()
            .iter()
            .zip(self.r.values())
            .map(|(t, r)| (r.conj() * t + r * t.conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Anything that produces output amplitudes at a single frequency.
pub trait Transmission: Sync {
    fn amplitudes(&self, omega: f64) -> Result<Amplitudes>;

    fn has_side_channel(&self) -> bool {
        false
    }

    /// Evaluate on a grid. Points are computed in parallel and collected
    /// in grid order.
    fn transfer(&self, grid: &FrequencyGrid) -> Result<TransferResult> {
        let amps: Vec<Amplitudes> = grid
            .points()
            .par_iter()
            .map(|&w| self.amplitudes(w))
            .collect::<Result<_>>()?;
        let t = Sampled::new(grid.clone(), amps.iter().map(|a| a.t).collect())?;
        let r = Sampled::new(grid.clone(), amps.iter().map(|a| a.r).collect())?;
        let side = if self.has_side_channel() {
            Some(Sampled::new(grid.clone(), amps.iter().map(|a| a.side).collect())?)
        } else {
            None
        };
        Ok(TransferResult { t, r, side })
    }
}

/// Closed-form model for the spec's topology, falling back to the direct
/// solver for general networks or networks with side channels.
pub fn model_for(spec: &NetworkSpec) -> Result<Box<dyn Transmission>> {
    spec.validate()?;
    if spec.has_side_channel() {
        return Ok(Box::new(DirectSolver::new(spec)?));
    }
    Ok(match &spec.topology {
        Topology::Simple => Box::new(SimpleModel::from_state(&spec.states[0])?),
        Topology::Parallel => Box::new(ParallelNetwork::from_states(&spec.states)?),
        Topology::Series => Box::new(SeriesNetwork::from_spec(spec)?),
        Topology::Hybrid { .. } => match HybridNetwork::from_spec(spec, HybridMode::UniformlyUnbalanced) {
            Ok(h) => Box::new(h),
            Err(_) => match HybridNetwork::from_spec(spec, HybridMode::Homogeneous) {
                Ok(h) => Box::new(h),
                Err(_) => Box::new(DirectSolver::new(spec)?),
            },
        },
        Topology::General => Box::new(DirectSolver::new(spec)?),
    })
}

pub fn transfer_simple(gamma: f64, big_gamma: f64, omega0: f64, grid: &FrequencyGrid) -> Result<TransferResult> {
    SimpleModel::new(omega0, gamma, big_gamma)?.transfer(grid)
}

/// Parallel states with `Γ_i = k γ_i`; the states' `gamma_out` must match.
pub fn transfer_parallel_unbalanced(states: &[DiscreteState], k: f64, grid: &FrequencyGrid) -> Result<TransferResult> {
    ParallelNetwork::unbalanced(states, k)?.transfer(grid)
}

pub fn transfer_parallel_homogeneous(
    omegas: &[f64],
    gamma: f64,
    big_gamma: f64,
    grid: &FrequencyGrid,
) -> Result<TransferResult> {
    ParallelNetwork::homogeneous(omegas, gamma, big_gamma)?.transfer(grid)
}

pub fn transfer_series(spec: &NetworkSpec, grid: &FrequencyGrid) -> Result<TransferResult> {
    SeriesNetwork::from_spec(spec)?.transfer(grid)
}

pub fn transfer_hybrid(spec: &NetworkSpec, mode: HybridMode, grid: &FrequencyGrid) -> Result<TransferResult> {
    HybridNetwork::from_spec(spec, mode)?.transfer(grid)
}

pub fn transfer_direct(spec: &NetworkSpec, grid: &FrequencyGrid) -> Result<TransferResult> {
    DirectSolver::new(spec)?.transfer(grid)
}
