use std::f64::consts::{E, PI};

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pdk::network::{SimpleModel, Transmission};
use pdk::povm::{
    assemble_povm, bayes_retrodict, binomial_readout, born_probability, element_purity, entropic_uncertainty,
    entropic_uncertainty_mixture, fluctuate_povm, mode_matched_design, mode_overlap, povm_purity, povm_weights,
    super_resolution_estimate, super_resolution_probabilities, toy_povm_limit, toy_povm_long_time,
    toy_povm_probability, ClickSet, DetectorSpec, FluctuatedParameter, Fluctuation, FluctuationSpec, InputState,
    ModeOverlap, ParameterDistribution, TRANSMISSION_FLOOR,
};
use pdk::spectral::{FrequencyGrid, Sampled, SpectralFunction};
use pdk::Error;

fn grid() -> FrequencyGrid {
    FrequencyGrid::uniform(-20.0, 20.0, 4001).unwrap()
}

fn gaussian(grid: &FrequencyGrid, w0: f64, s: f64, t0: f64) -> SpectralFunction {
    Sampled::from_fn(grid, |w| {
        Complex64::from_polar((-(w - w0).powi(2) / (4.0 * s * s)).exp(), w * t0)
    })
    .unwrap()
    .normalized()
    .unwrap()
}

fn simple_filter(grid: &FrequencyGrid, gamma: f64, big_gamma: f64) -> (SpectralFunction, SpectralFunction) {
    let r = SimpleModel::new(0.0, gamma, big_gamma).unwrap().transfer(grid).unwrap();
    (r.t, r.r)
}

fn overlap(detection_time: f64) -> ModeOverlap {
    let g = grid();
    let (t, r) = simple_filter(&g, 1.0, 1.0);
    mode_overlap(&gaussian(&g, 0.3, 0.8, -detection_time), &t, &r, detection_time).unwrap()
}

fn ideal(click: ClickSet, gain: u64) -> DetectorSpec {
    DetectorSpec::new(1.0, click, 0.0, 0.0, gain)
}

#[test]
fn readout_examples() {
    assert_relative_eq!(binomial_readout(2, 1, 0.5).unwrap(), 0.5);
    assert_relative_eq!(binomial_readout(3, 3, 0.9).unwrap(), 0.729, max_relative = 1e-14);
    assert_eq!(binomial_readout(5, 5, 1.0).unwrap(), 1.0);
    assert_eq!(binomial_readout(5, 0, 0.0).unwrap(), 1.0);
    assert!(binomial_readout(2, 3, 0.5).is_err());
    assert!(binomial_readout(2, 1, 1.5).is_err());
}

#[test]
fn threshold_and_finite_click_sets_agree() {
    let threshold = ClickSet::Threshold { k_min: 2 };
    let finite = ClickSet::Finite((2..=30).collect());
    for n in 0..=30 {
        assert_relative_eq!(
            threshold.click_probability(n, 0.6),
            finite.click_probability(n, 0.6),
            epsilon = 1e-13
        );
    }
    let doubled = ClickSet::Finite(vec![3, 3, 5]);
    assert_relative_eq!(
        doubled.click_probability(6, 0.4),
        ClickSet::Finite(vec![3, 5]).click_probability(6, 0.4)
    );
    assert!(ClickSet::Finite(vec![0, 1]).validate().is_err());
    assert!(ClickSet::Threshold { k_min: 0 }.validate().is_err());
}

#[test]
fn ideal_detector_projects_onto_the_filtered_photon() {
    let w = povm_weights(&ideal(ClickSet::Finite(vec![4]), 4), 1.0, 0.0).unwrap();
    assert_eq!(w.w0, 0.0);
    assert_relative_eq!(w.wt, 1.0, epsilon = 1e-15);
    let w = povm_weights(&ideal(ClickSet::Threshold { k_min: 1 }, 1), 0.6, 0.8).unwrap();
    assert_eq!(w.w0, 0.0);
    assert_relative_eq!(w.wt, 0.36, epsilon = 1e-15);
}

#[test]
fn noisy_unit_gain_detector_example() {
    // G = 1, η = 1, N̄ = 1, clicks k ≥ 1, τ = 1: w₀ = 1 − P_th(0) = 1/2, w_T = 1.
    let spec = DetectorSpec::new(1.0, ClickSet::Threshold { k_min: 1 }, 1.0, 0.0, 1);
    let w = povm_weights(&spec, 1.0, 0.0).unwrap();
    assert_relative_eq!(w.w0, 0.5, epsilon = 1e-12);
    assert_relative_eq!(w.wt, 1.0, epsilon = 1e-12);
}

#[test]
fn raising_the_click_threshold_suppresses_dark_counts() {
    let mut last = (f64::INFINITY, f64::INFINITY);
    for k_min in 1..=5 {
        let spec = DetectorSpec::new(0.9, ClickSet::Threshold { k_min }, 0.1, 0.05, 5);
        let w = povm_weights(&spec, 0.9, (1.0f64 - 0.81).sqrt()).unwrap();
        assert!(w.w0 < last.0 && w.wt <= last.1);
        last = (w.w0, w.wt);
    }
    // With G = 5 a threshold of 3 still keeps most single-photon clicks.
    let spec = DetectorSpec::new(0.9, ClickSet::Threshold { k_min: 3 }, 0.1, 0.0, 5);
    let w = povm_weights(&spec, 1.0, 0.0).unwrap();
    assert!(w.w0 < 1e-3 && w.wt > 0.9);
}

#[test]
fn trigger_weight_scales_the_photon_weight_only() {
    let mut spec = DetectorSpec::new(0.8, ClickSet::Threshold { k_min: 2 }, 0.3, 0.2, 3);
    let full = povm_weights(&spec, 0.9, 0.4).unwrap();
    spec.trigger_weight = 0.7;
    let part = povm_weights(&spec, 0.9, 0.4).unwrap();
    assert_eq!(full.w0, part.w0);
    assert_relative_eq!(part.wt, 0.7 * full.wt, max_relative = 1e-15);
}

#[test]
fn unreachable_truncation_is_reported() {
    let mut spec = DetectorSpec::new(0.5, ClickSet::Threshold { k_min: 1 }, 50.0, 0.0, 2);
    spec.max_n = 20;
    assert!(matches!(povm_weights(&spec, 1.0, 0.0), Err(Error::Truncation { .. })));
}

#[test]
fn lossless_filter_splits_the_trigger_between_ports() {
    let o = overlap(3.0);
    assert_relative_eq!(o.tau * o.tau + o.rho * o.rho, 1.0, epsilon = 1e-9);
    assert_relative_eq!(o.transmitted.norm_sqr_integral(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(o.reflected.as_ref().unwrap().norm_sqr_integral(), 1.0, epsilon = 1e-12);
}

#[test]
fn blocked_or_unnormalized_triggers_are_rejected() {
    let g = grid();
    let (t, r) = simple_filter(&g, 1.0, 0.0);
    let psi = gaussian(&g, 0.0, 1.0, 0.0);
    assert!(matches!(mode_overlap(&psi, &t, &r, 0.0), Err(Error::Infeasible(_))));
    let (t, r) = simple_filter(&g, 1.0, 1.0);
    assert!(mode_overlap(&psi.scaled(Complex64::new(2.0, 0.0)), &t, &r, 0.0).is_err());
}

#[test]
fn born_probabilities_for_vacuum_and_photons() {
    let o = overlap(3.0);
    let spec = DetectorSpec::new(0.9, ClickSet::Threshold { k_min: 1 }, 0.05, 0.0, 2);
    let el = assemble_povm(&spec, &o).unwrap();
    assert_relative_eq!(born_probability(&el, &InputState::vacuum()).unwrap(), el.w0);
    assert_relative_eq!(
        born_probability(&el, &InputState::photon(el.state.clone())).unwrap(),
        el.wt,
        max_relative = 1e-12
    );
    // A photon with opposite parity in time has no overlap with the projected mode's real envelope.
    let mix = InputState {
        vacuum: 0.25,
        photons: vec![(0.75, el.state.clone())],
    };
    assert_relative_eq!(
        born_probability(&el, &mix).unwrap(),
        0.25 * el.w0 + 0.75 * el.wt,
        max_relative = 1e-12
    );
    let bad = InputState {
        vacuum: 0.5,
        photons: vec![],
    };
    assert!(born_probability(&el, &bad).is_err());
}

#[test]
fn far_detuned_photon_is_not_detected() {
    let o = overlap(3.0);
    let el = assemble_povm(&ideal(ClickSet::Threshold { k_min: 1 }, 1), &o).unwrap();
    let far = gaussian(&grid(), 12.0, 0.8, 0.0);
    assert!(born_probability(&el, &InputState::photon(far)).unwrap() < 1e-12);
}

#[test]
fn bayesian_retrodiction() {
    let post = bayes_retrodict(&[0.9, 0.1], &[0.5, 0.5]).unwrap();
    assert_relative_eq!(post[0], 0.9);
    let post = bayes_retrodict(&[0.8, 0.2, 0.0], &[0.2, 0.3, 0.5]).unwrap();
    assert_relative_eq!(post[0], 0.16 / 0.22, max_relative = 1e-14);
    assert_eq!(post[2], 0.0);
    assert!(matches!(
        bayes_retrodict(&[0.0, 0.0], &[0.5, 0.5]),
        Err(Error::Infeasible(_))
    ));
    assert!(bayes_retrodict(&[0.5], &[0.9]).is_err());
}

#[test]
fn purity_examples() {
    let o = overlap(3.0);
    let el = assemble_povm(&ideal(ClickSet::Threshold { k_min: 1 }, 1), &o).unwrap();
    assert_relative_eq!(element_purity(&el).unwrap(), 1.0);
    let same = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
    assert_relative_eq!(povm_purity(&[0.3, 0.7], &same).unwrap(), 1.0, epsilon = 1e-15);
    let orth = DMatrix::identity(2, 2);
    assert_relative_eq!(povm_purity(&[0.5, 0.5], &orth).unwrap(), 0.5);
    assert!(povm_purity(&[0.0, 0.0], &orth).is_err());
}

#[test]
fn gaussian_minimizes_the_entropic_product() {
    let g = FrequencyGrid::centered(0.0, 0.01, 8192).unwrap();
    let f = gaussian(&g, 0.0, 0.5, 0.0);
    let rep = entropic_uncertainty(&f, 1e-3, 1e-3).unwrap();
    assert_relative_eq!(rep.product, PI * E, max_relative = 1e-3);
    let two = Sampled::from_fn(&g, |w| {
        Complex64::new((-(w - 3.0).powi(2)).exp() + (-(w + 3.0).powi(2)).exp(), 0.0)
    })
    .unwrap()
    .normalized()
    .unwrap();
    let rep2 = entropic_uncertainty(&two, 1e-3, 1e-3).unwrap();
    assert!(rep2.product > PI * E * 1.05);
    // An incoherent mixture is wider in time than either component.
    let shifted = gaussian(&g, 0.0, 0.5, 4.0);
    let mix = entropic_uncertainty_mixture(&[(0.5, &f), (0.5, &shifted)], 1e-3, 1e-3).unwrap();
    assert!(mix.delta_t > rep.delta_t * 1.5);
    assert_relative_eq!(mix.delta_omega, rep.delta_omega, max_relative = 1e-9);
}

#[test]
fn mode_matching_through_a_lorentzian_is_exact() {
    let g = grid();
    let (t, r) = simple_filter(&g, 1.0, 1.5);
    let target = gaussian(&g, 0.5, 0.5, 0.0);
    let design = mode_matched_design(&target, &t, 4.0, TRANSMISSION_FLOOR).unwrap();
    assert_relative_eq!(design.efficiency_ratio, 1.0, epsilon = 1e-9);
    let o = mode_overlap(&design.psi_tilde, &t, &r, 4.0).unwrap();
    assert_relative_eq!(o.transmitted.inner(&target).unwrap().norm(), 1.0, epsilon = 1e-9);
    let el = assemble_povm(&ideal(ClickSet::Threshold { k_min: 1 }, 1), &o).unwrap();
    assert_relative_eq!(
        born_probability(&el, &InputState::photon(target)).unwrap(),
        el.wt,
        max_relative = 1e-9
    );
}

#[test]
fn mode_matching_fails_on_a_transmission_zero() {
    let g = grid();
    let t = Sampled::from_fn(&g, |w| Complex64::new(w - 0.2, 0.0) / Complex64::new(1.0, -w)).unwrap();
    let target = gaussian(&g, 0.0, 0.5, 0.0);
    let err = mode_matched_design(&target, &t, 0.0, TRANSMISSION_FLOOR).unwrap_err();
    assert!(matches!(err, Error::BandGap { omega } if (omega - 0.2).abs() <= 0.01));
}

fn spec() -> DetectorSpec {
    DetectorSpec::new(0.8, ClickSet::Threshold { k_min: 2 }, 0.05, 0.02, 3)
}

fn fluct(parameters: Vec<Fluctuation>) -> FluctuationSpec {
    FluctuationSpec {
        parameters,
        samples: 400,
        seed: 5,
        strict: false,
    }
}

#[test]
fn fixed_parameters_reproduce_the_nominal_element() {
    let o = overlap(3.0);
    let nominal = assemble_povm(&spec(), &o).unwrap();
    let f = fluct(vec![Fluctuation {
        parameter: FluctuatedParameter::Eta,
        distribution: ParameterDistribution::Fixed { value: 0.8 },
    }]);
    let mixed = fluctuate_povm(&spec(), &o, 3.0, &f).unwrap();
    assert_relative_eq!(mixed.w0, nominal.w0, max_relative = 1e-12);
    assert_relative_eq!(mixed.wt, nominal.wt, max_relative = 1e-12);
    assert_eq!(mixed.eigenvalues.len(), 1);
    assert_relative_eq!(
        mixed.states[0].inner(&nominal.state).unwrap().norm(),
        1.0,
        epsilon = 1e-9
    );
}

#[test]
fn efficiency_noise_changes_weights_but_not_the_mode() {
    let o = overlap(3.0);
    let nominal = assemble_povm(&spec(), &o).unwrap();
    let f = fluct(vec![Fluctuation {
        parameter: FluctuatedParameter::Eta,
        distribution: ParameterDistribution::Uniform { low: 0.6, high: 1.0 },
    }]);
    let mixed = fluctuate_povm(&spec(), &o, 3.0, &f).unwrap();
    assert_eq!(mixed.eigenvalues.len(), 1);
    assert_relative_eq!(
        mixed.states[0].inner(&nominal.state).unwrap().norm(),
        1.0,
        epsilon = 1e-9
    );
    assert!((mixed.wt - nominal.wt).abs() > 1e-4);
}

#[test]
fn timing_jitter_mixes_the_mode_and_keeps_the_trace() {
    let o = overlap(3.0);
    let nominal = assemble_povm(&spec(), &o).unwrap();
    let f = fluct(vec![Fluctuation {
        parameter: FluctuatedParameter::DetectionTime,
        distribution: ParameterDistribution::Normal { mean: 3.0, std: 0.5 },
    }]);
    let mixed = fluctuate_povm(&spec(), &o, 3.0, &f).unwrap();
    assert!(mixed.eigenvalues.len() > 1);
    assert_relative_eq!(mixed.eigenvalues.iter().sum::<f64>(), mixed.wt, max_relative = 1e-9);
    // Timing alone leaves the weights unchanged.
    assert_relative_eq!(mixed.wt, nominal.wt, max_relative = 1e-12);
    assert!(mixed.purity < element_purity(&nominal).unwrap() - 1e-3);
    // Well-conditioned eigenstates are orthonormal.
    let strong: Vec<_> = mixed
        .eigenvalues
        .iter()
        .zip(&mixed.states)
        .filter(|(l, _)| **l > 1e-6 * mixed.wt)
        .map(|(_, s)| s)
        .collect();
    assert!(strong.len() > 1);
    for (a, s) in strong.iter().enumerate() {
        assert_relative_eq!(s.norm_sqr_integral(), 1.0, epsilon = 1e-8);
        for b in &strong[a + 1..] {
            assert!(s.inner(b).unwrap().norm() < 1e-8);
        }
    }
}

#[test]
fn invalid_samples_are_skipped_or_fatal() {
    let o = overlap(3.0);
    let mut f = fluct(vec![Fluctuation {
        parameter: FluctuatedParameter::Eta,
        distribution: ParameterDistribution::Uniform { low: 0.5, high: 1.5 },
    }]);
    let mixed = fluctuate_povm(&spec(), &o, 3.0, &f).unwrap();
    assert!(!mixed.skipped.is_empty());
    assert_eq!(mixed.used + mixed.skipped.len(), 400);
    f.strict = true;
    assert!(matches!(fluctuate_povm(&spec(), &o, 3.0, &f), Err(Error::Parameter(_))));
}

#[test]
fn fluctuation_is_deterministic_per_seed() {
    let o = overlap(3.0);
    let f = fluct(vec![
        Fluctuation {
            parameter: FluctuatedParameter::Nbar,
            distribution: ParameterDistribution::Uniform { low: 0.0, high: 0.2 },
        },
        Fluctuation {
            parameter: FluctuatedParameter::Gain,
            distribution: ParameterDistribution::Discrete {
                values: vec![2.0, 3.0],
                probabilities: vec![0.5, 0.5],
            },
        },
    ]);
    assert_eq!(
        fluctuate_povm(&spec(), &o, 3.0, &f).unwrap(),
        fluctuate_povm(&spec(), &o, 3.0, &f).unwrap()
    );
}

#[test]
fn super_resolution_without_a_weak_mode() {
    let r = super_resolution_estimate(0.0, 0.5, 20_000, 3).unwrap();
    assert_eq!(r.n2, 0);
    assert_eq!(r.estimate, 0.0);
    let (p1, p2) = super_resolution_probabilities(0.25, 0.4).unwrap();
    assert_relative_eq!(p1 + p2, 0.4, epsilon = 1e-15);
    assert_relative_eq!(p2 / p1, 0.25, epsilon = 1e-15);
    assert!(super_resolution_estimate(0.1, 0.5, 100, 3).is_err());
    assert!(super_resolution_probabilities(0.1, 0.0).is_err());
}

#[test]
fn toy_detector_approaches_its_long_time_limit() {
    let g = FrequencyGrid::uniform(-30.0, 30.0, 3001).unwrap();
    let (t, _) = simple_filter(&g, 1.0, 1.0);
    let input = gaussian(&g, 0.3, 0.6, 0.0);
    let limit = toy_povm_limit(&t, &input).unwrap();
    let short = toy_povm_probability(&t, &input, -2.0, 3.0, 301).unwrap();
    let long = toy_povm_probability(&t, &input, -15.0, 40.0, 2001).unwrap();
    assert!(short < long);
    assert_relative_eq!(long, limit, max_relative = 1e-4);
    let lt = toy_povm_long_time(&t);
    assert_relative_eq!(lt[g.nearest(0.0)], 1.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn readout_is_a_distribution(n in 0u64..200, eta in 0.0f64..=1.0) {
        let total: f64 = (0..=n).map(|k| binomial_readout(n, k, eta).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weights_are_bounded_and_monotone_in_efficiency(
        eta in 0.05f64..0.95, nbar in 0.0f64..0.5, nbar_p in 0.0f64..0.5, gain in 1u64..6, k_min in 1u64..4,
        tau in 0.0f64..=1.0,
    ) {
        let rho = (1.0 - tau * tau).sqrt();
        let lo = DetectorSpec::new(eta, ClickSet::Threshold { k_min }, nbar, nbar_p, gain);
        let hi = DetectorSpec::new(eta + 0.05, ClickSet::Threshold { k_min }, nbar, nbar_p, gain);
        let (a, b) = (povm_weights(&lo, tau, rho).unwrap(), povm_weights(&hi, tau, rho).unwrap());
        prop_assert!((0.0..=1.0).contains(&a.w0) && (0.0..=1.0 + 1e-12).contains(&a.wt));
        prop_assert!(b.w0 >= a.w0 - 1e-13 && b.wt >= a.wt - 1e-13);
    }

    #[test]
    fn overlaps_conserve_the_trigger(gamma in 0.2f64..3.0, big_gamma in 0.2f64..3.0, w0 in -2.0f64..2.0, big_t in 0.0f64..5.0) {
        let g = grid();
        let (t, r) = simple_filter(&g, gamma, big_gamma);
        let o = mode_overlap(&gaussian(&g, w0, 0.7, -big_t), &t, &r, big_t).unwrap();
        prop_assert!((o.tau * o.tau + o.rho * o.rho - 1.0).abs() < 1e-9);
    }
}
