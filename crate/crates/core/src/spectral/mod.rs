//! Grids, sampled complex functions, quadrature, Fourier transforms and
//! transmission-function metrics.

pub mod fourier;
pub mod function;
pub mod grid;
pub mod metrics;
pub mod quadrature;

pub use fourier::FourierOptions;
pub use function::{Sampled, SpectralFunction, TemporalFunction};
pub use grid::{FrequencyGrid, Grid, TimeGrid};
pub use metrics::{
    accumulated_phase, dispersion_metric, dispersion_metric_with, group_delay, group_delay_with, spectral_bandwidth,
    spectral_bandwidth_with, unitarity_defect, unwrapped_phase, Profile, PHASE_FLOOR, TAIL_TOLERANCE,
};
