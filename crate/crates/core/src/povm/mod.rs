//! Assembly of the detector POVM element and its figures of merit.
//!
//! A click projects onto `w₀|vac⟩⟨vac| + w_T|TΨ_T⟩⟨TΨ_T|`: the vacuum
//! term collects dark counts from thermal excitations, the single-photon
//! term the filtered trigger mode. Weights come from summing binomial
//! readout over amplified thermal and trigger excitations.

mod element;
mod fluctuation;
mod matching;
mod readout;
mod superres;
mod toy;
mod uncertainty;
mod weights;

pub use element::{
    assemble_povm, bayes_retrodict, born_probability, element_purity, mode_overlap, povm_purity, InputState,
    ModeOverlap, PovmElement, NORM_TOLERANCE,
};
pub use fluctuation::{
    fluctuate_povm, FluctuatedParameter, Fluctuation, FluctuationSpec, MixedElement, ParameterDistribution, EIGEN_FLOOR,
};
pub use matching::{mode_matched_design, MatchedDesign, TRANSMISSION_FLOOR};
pub use readout::{binomial_readout, ClickSet};
pub use superres::{super_resolution_estimate, super_resolution_probabilities, SuperResolution, MIN_TRIALS};
pub use toy::{toy_povm_limit, toy_povm_long_time, toy_povm_probability};
pub use uncertainty::{
    binned_entropy, entropic_uncertainty, entropic_uncertainty_mixture, UncertaintyReport, COVERAGE,
};
pub use weights::{povm_weights, DetectorSpec, PovmWeights};
