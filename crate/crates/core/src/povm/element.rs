use nalgebra::DMatrix;
use num_complex::Complex64;

use super::weights::{povm_weights, DetectorSpec, PovmWeights};
use crate::error::{param, Error, Result};
use crate::spectral::{Sampled, SpectralFunction};

/// Tolerance on the normalization of trigger spectra and input states.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Filter overlaps and the normalized transmitted and reflected states.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOverlap {
    pub tau: f64,
    pub rho: f64,
    /// `Ψ̃ T* e^{iωT}/τ`.
    pub transmitted: SpectralFunction,
    /// `Ψ̃ R* e^{iωT}/ρ`, absent when `ρ = 0`.
    pub reflected: Option<SpectralFunction>,
}

fn require_normalized(f: &Sampled, what: &str) -> Result<()> {
    let n = f.norm_sqr_integral();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return param(format!("{what} must be normalized, has norm^2 {n}"));
    }
    Ok(())
}

/// `τ² = ∫|Ψ̃|²|T|²`, `ρ² = ∫|Ψ̃|²|R|²` and the corresponding states for a
/// click at `detection_time`.
pub fn mode_overlap(
    psi_tilde: &SpectralFunction,
    t: &SpectralFunction,
    r: &SpectralFunction,
    detection_time: f64,
) -> Result<ModeOverlap> {
    psi_tilde.require_same_grid(t)?;
    psi_tilde.require_same_grid(r)?;
    require_normalized(psi_tilde, "trigger spectrum")?;
    let project = |filter: &Sampled| {
        psi_tilde
            .map(|w, p| p * Complex64::from_polar(1.0, w * detection_time))
            .and_then(|shifted| shifted.product(&filter.conj()))
    };
    let tp = project(t)?;
    let rp = project(r)?;
    let tau = tp.norm_sqr_integral().sqrt();
    let rho = rp.norm_sqr_integral().sqrt();
    if !(tau > 0.0) {
        return Err(Error::Infeasible(
            "the filter blocks the whole trigger spectrum (tau = 0)".into(),
        ));
    }
    Ok(ModeOverlap {
        tau,
        rho,
        transmitted: tp.scaled(Complex64::new(1.0 / tau, 0.0)),
        reflected: (rho > 0.0).then(|| rp.scaled(Complex64::new(1.0 / rho, 0.0))),
    })
}

/// `w₀|vac⟩⟨vac| + w_T|TΨ_T⟩⟨TΨ_T|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub w0: f64,
    pub wt: f64,
    pub state: SpectralFunction,
    pub weights: PovmWeights,
}

pub fn assemble_povm(spec: &DetectorSpec, overlap: &ModeOverlap) -> Result<PovmElement> {
    let weights = povm_weights(spec, overlap.tau, overlap.rho)?;
    Ok(PovmElement {
        w0: weights.w0,
        wt: weights.wt,
        state: overlap.transmitted.clone(),
        weights,
    })
}

/// Input density matrix diagonal in photon number: vacuum population
/// plus an incoherent mixture of normalized single-photon spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    pub vacuum: f64,
    pub photons: Vec<(f64, SpectralFunction)>,
}

impl InputState {
    pub fn vacuum() -> Self {
        InputState {
            vacuum: 1.0,
            photons: Vec::new(),
        }
    }

    pub fn photon(f: SpectralFunction) -> Self {
        InputState {
            vacuum: 0.0,
            photons: vec![(1.0, f)],
        }
    }
}

/// `w₀⟨vac|ρ|vac⟩ + w_T⟨TΨ_T|ρ|TΨ_T⟩`.
pub fn born_probability(element: &PovmElement, input: &InputState) -> Result<f64> {
    let trace = input.vacuum + input.photons.iter().map(|(p, _)| p).sum::<f64>();
    if (trace - 1.0).abs() > 1e-9 || input.vacuum < 0.0 || input.photons.iter().any(|(p, _)| *p < 0.0) {
        return param(format!(
            "input must be a density matrix with unit trace, trace = {trace}"
        ));
    }
    let mut single = 0.0;
    for (p, f) in &input.photons {
        require_normalized(f, "input photon")?;
        single += p * element.state.inner(f)?.norm_sqr();
    }
    Ok((element.w0 * input.vacuum + element.wt * single).clamp(0.0, 1.0))
}

/// Posterior `P(i|k) = w_i P(i)/Σ_j w_j P(j)`.
pub fn bayes_retrodict(weights: &[f64], priors: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != priors.len() || weights.is_empty() {
        return param("weights and priors must be non-empty and of equal length");
    }
    if priors.iter().any(|&p| !(p >= 0.0)) || weights.iter().any(|&w| !(w >= 0.0)) {
        return param("weights and priors must be >= 0");
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return param(format!("priors must sum to 1, got {total}"));
    }
    let evidence: f64 = weights.iter().zip(priors).map(|(w, p)| w * p).sum();
    if !(evidence > 0.0) {
        return Err(Error::Infeasible("outcome has zero probability under the prior".into()));
    }
    Ok(weights.iter().zip(priors).map(|(w, p)| w * p / evidence).collect())
}

/// `Tr Π²/(Tr Π)²` for `Π = Σ w_i|ψ_i⟩⟨ψ_i|` with normalized states of
/// Gram matrix `S_ij = ⟨ψ_i|ψ_j⟩`.
pub fn povm_purity(weights: &[f64], gram: &DMatrix<Complex64>) -> Result<f64> {
    let n = weights.len();
    if gram.nrows() != n || gram.ncols() != n {
        return param("Gram matrix must match the number of weights");
    }
    let trace: f64 = weights.iter().sum();
    if !(trace > 0.0) {
        return param("POVM element has zero trace");
    }
    let mut sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            sq += weights[i] * weights[j] * gram[(i, j)].norm_sqr();
        }
    }
    Ok(sq / (trace * trace))
}

/// Purity of an assembled element; vacuum and photon are orthogonal.
pub fn element_purity(element: &PovmElement) -> Result<f64> {
    let gram = DMatrix::from_diagonal_element(2, 2, Complex64::new(1.0, 0.0));
    povm_purity(&[element.w0, element.wt], &gram)
}
