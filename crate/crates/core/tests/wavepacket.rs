use approx::assert_relative_eq;
use proptest::prelude::*;

use pdk::spectral::TimeGrid;
use pdk::wavepacket::{
    detection_probability_resampled, forward_amplitude, inverse_design, polynomial_decay, round_trip_error,
    trigger_spectrum, windowed_polynomial_decay, CouplingSchedule, GaussianPulse, InverseOptions, TargetWavepacket,
};
use pdk::Error;

fn pulse(t0: f64, sigma: f64, omega0: f64) -> GaussianPulse {
    GaussianPulse { t0, sigma, omega0 }
}

#[test]
fn constant_decay_matches_closed_form() {
    let (kappa, t0, big_t) = (0.8, -2.0, 3.0);
    let grid = TimeGrid::uniform(t0, big_t, 2001).unwrap();
    let amp = forward_amplitude(&CouplingSchedule::constant(grid.clone(), kappa, 0.4).unwrap()).unwrap();
    assert_relative_eq!(amp.weight, 1.0 - (-kappa * (big_t - t0)).exp(), max_relative = 1e-13);
    assert!(amp.norm_defect < 1e-12);
    for (t, v) in grid.points().iter().zip(amp.psi.values()) {
        let expected = kappa.sqrt() * (-0.5 * kappa * (big_t - t)).exp();
        assert!((v.norm() - expected).abs() < 1e-12);
        // Phase ∫_t^T Δ grows linearly backwards from T.
        let phase_err = (v.arg() - 0.4 * (big_t - t)).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(phase_err.min(2.0 * std::f64::consts::PI - phase_err) < 1e-10);
    }
}

#[test]
fn switched_off_trigger_never_clicks() {
    let grid = TimeGrid::uniform(0.0, 1.0, 101).unwrap();
    let amp = forward_amplitude(&CouplingSchedule::constant(grid, 0.0, 1.0).unwrap()).unwrap();
    assert_eq!(amp.weight, 0.0);
    assert!(amp.psi.values().iter().all(|v| v.norm() == 0.0));
    assert!(amp.mode().is_err());
}

#[test]
fn negative_or_mismatched_schedules_are_rejected() {
    let grid = TimeGrid::uniform(0.0, 1.0, 3).unwrap();
    assert!(matches!(
        CouplingSchedule::new(grid.clone(), vec![0.1, -0.1, 0.1], vec![0.0; 3]),
        Err(Error::Parameter(_))
    ));
    assert!(CouplingSchedule::new(grid, vec![0.1; 2], vec![0.0; 3]).is_err());
}

#[test]
fn polynomial_decay_peaks_before_detection() {
    let grid = TimeGrid::uniform(0.0, 6.0, 3001).unwrap();
    for n in 1..=3 {
        let amp = forward_amplitude(&polynomial_decay(1.0, 2.0, n, grid.clone()).unwrap()).unwrap();
        let p = amp.psi.norm_sqr();
        let peak = p
            .iter()
            .cloned()
            .enumerate()
            .fold((0, 0.0), |b, (i, v)| if v > b.1 { (i, v) } else { b })
            .0;
        assert!(peak > 0 && peak < grid.len() - 1);
        assert_eq!(p[grid.len() - 1], 0.0);
    }
    let windowed = forward_amplitude(&windowed_polynomial_decay(1.0, 2.0, 2, grid.clone()).unwrap()).unwrap();
    let p = windowed.psi.norm_sqr();
    assert_eq!(p[0], 0.0);
    assert_eq!(p[grid.len() - 1], 0.0);
    assert!(polynomial_decay(-1.0, 1.0, 1, grid).is_err());
}

#[test]
fn offset_gaussian_overlap_decays_with_separation() {
    let (sigma, t0) = (1.0, 0.0);
    let base = pulse(t0, sigma, 0.7);
    let grid = base.grid(10.0, 4001).unwrap();
    let design = inverse_design(
        &TargetWavepacket::gaussian(base, grid.clone()).unwrap(),
        8.0,
        InverseOptions::default(),
    )
    .unwrap();
    let amp = forward_amplitude(&design.schedule).unwrap();
    for delta in [0.0, 0.5, 1.0, 2.0] {
        let shifted = TargetWavepacket::gaussian(pulse(t0 + delta, sigma, 0.7), grid.clone()).unwrap();
        let p = detection_probability_resampled(&shifted.photon().unwrap(), &amp).unwrap();
        let expected = amp.weight * (-delta * delta / (4.0 * sigma * sigma)).exp();
        assert!((p - expected).abs() < 1e-6, "delta {delta}: {p} vs {expected}");
    }
}

#[test]
fn orthogonal_pulse_is_orthogonal_to_its_base() {
    let base = pulse(0.0, 1.0, 0.0);
    let grid = base.grid(10.0, 4001).unwrap();
    let g = TargetWavepacket::gaussian(base, grid.clone())
        .unwrap()
        .conjugate_amplitude()
        .unwrap();
    for (z, s) in [(0.5, 0.5), (1.0, 0.5), (0.8, 0.2)] {
        let hg = TargetWavepacket::orthogonal_pulse(base, z, s, grid.clone())
            .unwrap()
            .conjugate_amplitude()
            .unwrap();
        assert!(g.inner(&hg).unwrap().norm() < 1e-8);
        assert_relative_eq!(hg.norm_sqr_integral(), 1.0, max_relative = 1e-9);
    }
    assert!(matches!(
        TargetWavepacket::orthogonal_pulse(base, 0.2, 0.5, grid),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn orthogonal_pulse_needs_a_later_detection_time() {
    let base = pulse(0.0, 1.0, 0.0);
    let grid = base.grid(10.0, 4001).unwrap();
    let gauss = TargetWavepacket::gaussian(base, grid.clone()).unwrap();
    let hg = TargetWavepacket::orthogonal_pulse(base, 0.5, 0.5, grid).unwrap();
    let opts = InverseOptions {
        min_weight: 0.1,
        ..InverseOptions::default()
    };
    let w = |t: &TargetWavepacket, big_t| inverse_design(t, big_t, opts).unwrap().achievable_weight;
    assert!(w(&hg, 2.0) < w(&gauss, 2.0));
    assert!(1.0 - w(&hg, 7.0) < 1e-5);
}

#[test]
fn window_ending_before_the_pulse_is_infeasible() {
    let base = pulse(0.0, 1.0, 0.0);
    let target = TargetWavepacket::gaussian(base, base.grid(8.0, 1601).unwrap()).unwrap();
    assert!(matches!(
        inverse_design(&target, -1.0, InverseOptions::default()),
        Err(Error::InfeasibleWindow(_))
    ));
    assert!(matches!(
        inverse_design(&target, 9.0, InverseOptions::default()),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn phase_jump_under_the_pulse_fails_smoothness() {
    let base = pulse(0.0, 1.0, 0.0);
    let grid = base.grid(8.0, 1601).unwrap();
    let amp: Vec<f64> = grid.points().iter().map(|&t| base.amplitude(t)).collect();
    let phase: Vec<f64> = grid.points().iter().map(|&t| if t < 0.3 { 0.0 } else { 2.0 }).collect();
    let target = TargetWavepacket::from_samples(grid, amp, phase).unwrap();
    assert!(matches!(
        inverse_design(&target, 5.0, InverseOptions::default()),
        Err(Error::Smoothness { time }) if (time - 0.3).abs() < 0.02
    ));
}

#[test]
fn designed_trigger_detects_its_target_with_the_achievable_weight() {
    let base = pulse(1.0, 0.8, -0.6);
    let grid = base.grid(10.0, 4001).unwrap();
    let target = TargetWavepacket::gaussian(base, grid).unwrap();
    for big_t in [1.5, 2.5, 4.0] {
        let design = inverse_design(&target, big_t, InverseOptions::default()).unwrap();
        let amp = forward_amplitude(&design.schedule).unwrap();
        assert_relative_eq!(
            amp.weight,
            design.achievable_weight + base.mass_before(base.t0 - 8.0),
            max_relative = 1e-8
        );
        assert!(round_trip_error(&target, &amp).unwrap() < 1e-7);
        let p = detection_probability_resampled(&target.photon().unwrap(), &amp).unwrap();
        assert_relative_eq!(p, amp.weight * amp.weight, max_relative = 1e-6);
    }
}

#[test]
fn trigger_spectrum_of_a_long_window_is_the_pulse_spectrum() {
    let (sigma, omega0) = (0.7, 1.3);
    let base = pulse(0.5, sigma, omega0);
    let design = inverse_design(
        &TargetWavepacket::gaussian(base, base.grid(10.0, 4001).unwrap()).unwrap(),
        base.t0 + 8.0 * sigma,
        InverseOptions::default(),
    )
    .unwrap();
    let amp = forward_amplitude(&design.schedule).unwrap();
    let spec = trigger_spectrum(&amp, sigma / 10.0, 8192, omega0).unwrap();
    assert_relative_eq!(spec.norm_sqr_integral(), 1.0, max_relative = 1e-12);
    // |Ψ̃|² is a Gaussian of standard deviation 1/(2σ) about the carrier.
    let w = spec.points();
    let p = spec.norm_sqr();
    let h = w[1] - w[0];
    let mean: f64 = w.iter().zip(&p).map(|(x, y)| x * y).sum::<f64>() * h;
    let var: f64 = w.iter().zip(&p).map(|(x, y)| (x - mean).powi(2) * y).sum::<f64>() * h;
    assert!((mean - omega0).abs() < 1e-6, "{mean}");
    assert!((var.sqrt() - 0.5 / sigma).abs() < 1e-6, "{}", var.sqrt());
    // Too short a sampling window is rejected.
    assert!(matches!(
        trigger_spectrum(&amp, sigma / 10.0, 64, omega0),
        Err(Error::Grid(_))
    ));
}

fn random_schedule() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.0f64..2.0, 4),
        prop::collection::vec(-1.0f64..1.0, 3),
    )
}

fn build(coeffs: &[f64], det: &[f64], grid: TimeGrid) -> CouplingSchedule {
    let t = grid.points();
    let span = grid.last() - grid.first();
    let kappa = t
        .iter()
        .map(|&x| {
            let u = (x - grid.first()) / span;
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (std::f64::consts::PI * k as f64 * u).cos().powi(2))
                .sum()
        })
        .collect();
    let detuning = t.iter().map(|&x| det[0] + det[1] * x + det[2] * x.sin()).collect();
    CouplingSchedule::new(grid, kappa, detuning).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weight_is_norm_and_grows_with_the_window((coeffs, det) in random_schedule(), start in -4.0f64..-1.0) {
        let grid = TimeGrid::uniform(start, 2.0, 1201).unwrap();
        let amp = forward_amplitude(&build(&coeffs, &det, grid.clone())).unwrap();
        prop_assert!(amp.norm_defect < 1e-9);
        prop_assert!(amp.weight >= 0.0 && amp.weight <= 1.0);
        // Same schedule on a shorter window ending at the same T.
        let later = TimeGrid::new(grid.points()[300..].to_vec()).unwrap();
        let sched = build(&coeffs, &det, grid.clone());
        let short = CouplingSchedule::new(
            later.clone(),
            sched.kappa()[300..].to_vec(),
            sched.detuning()[300..].to_vec(),
        ).unwrap();
        prop_assert!(forward_amplitude(&short).unwrap().weight <= amp.weight + 1e-15);
    }

    #[test]
    fn gaussian_designs_round_trip(
        t0 in -1.0f64..1.0, sigma in 0.4f64..1.5, omega0 in -2.0f64..2.0, after in 0.0f64..5.0,
    ) {
        let base = pulse(t0, sigma, omega0);
        let target = TargetWavepacket::gaussian(base, base.grid(9.0, 3601).unwrap()).unwrap();
        let design = inverse_design(&target, t0 + after * sigma, InverseOptions::default()).unwrap();
        let amp = forward_amplitude(&design.schedule).unwrap();
        prop_assert!(round_trip_error(&target, &amp).unwrap() < 1e-6);
        prop_assert!(design.schedule.detuning().iter().all(|d| (d - omega0).abs() < 1e-8));
        prop_assert!(amp.weight >= design.achievable_weight - 1e-12);
    }
}

#[test]
fn spiky_schedules_stay_finite() {
    let grid = TimeGrid::uniform(0.0, 1.0, 401).unwrap();
    let mut kappa = vec![0.5; 401];
    kappa[0] = 1e12;
    kappa[7] = 1e9;
    let amp = forward_amplitude(&CouplingSchedule::new(grid, kappa, vec![0.0; 401]).unwrap()).unwrap();
    assert!(amp.weight <= 1.0);
    assert!(amp.psi.values().iter().all(|v| v.is_finite()));
}
