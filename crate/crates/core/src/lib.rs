//! Numerical models of single-photon detectors built from three stages:
//! a quantum network that filters the incoming photon, a time-dependent
//! two-level trigger, and photon-number amplification followed by a
//! macroscopic readout.
//!
//! Frequencies are angular (rad per user-chosen time unit) and measured in
//! a rotating frame, so negative values are ordinary detunings. The
//! Fourier convention is `f̃(ω) = (2π)^{-1/2} ∫ f(t) e^{iωt} dt`; with it a
//! delayed pulse carries the phase factor `e^{iωτ}` and group delay is
//! `+dφ/dω`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplification;
pub mod error;
pub mod network;
pub mod povm;
pub mod spectral;
pub mod wavepacket;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
