use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pdk::wavepacket::GaussianPulse;
use serde_json::Value;
use tempfile::TempDir;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../presets")
        .join(format!("{name}.json"))
}

fn pdk(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdk"));
    cmd.args(args).env_remove("PDK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

/// Runs `command` on a preset into a fresh directory.
fn run_preset(command: &str, name: &str, extra: &[&str]) -> (Output, TempDir) {
    let dir = TempDir::new().unwrap();
    let config = preset(name);
    let mut args = vec![
        command,
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    (pdk(&args, &[]), dir)
}

fn ok(command: &str, name: &str) -> TempDir {
    let (out, dir) = run_preset(command, name, &[]);
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn error_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn json(dir: &TempDir, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.path().join(name)).unwrap()).unwrap()
}

/// Header and numeric rows; empty cells become `None`.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|c| (!c.is_empty()).then(|| c.parse().unwrap()))
                .collect()
        })
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn missing_config_exits_with_config_error() {
    let dir = TempDir::new().unwrap();
    let out = pdk(
        &[
            "transmit",
            "--config",
            "/nonexistent/x.json",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["class"], "config");
    assert!(err["message"].as_str().unwrap().contains("config not found"));
}

#[test]
fn malformed_configs_and_arguments_exit_with_config_error() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"network": {"kind": "simple", "omega": 0, "gamma": 1, "big_gamma": 1}, "grid": {"kind": "uniform", "start": -1, "end": 1, "points": 11}, "typo": 1}"#).unwrap();
    let out = pdk(
        &[
            "transmit",
            "--config",
            bad.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["message"].as_str().unwrap().contains("typo"));

    let out = pdk(&["transmit", "--out", "x"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "usage");

    let negative = dir.path().join("neg.json");
    fs::write(&negative, r#"{"network": {"kind": "simple", "omega": 0, "gamma": -1, "big_gamma": 1}, "grid": {"kind": "uniform", "start": -1, "end": 1, "points": 11}}"#).unwrap();
    let out = pdk(
        &[
            "transmit",
            "--config",
            negative.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_thread_cap_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let config = preset("transmit_simple");
    let args = [
        "transmit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ];
    let out = pdk(&args, &[("PDK_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(pdk(&args, &[("PDK_THREADS", "2")]).status.success());
}

#[test]
fn simple_filter_transmits_perfectly_on_resonance() {
    let dir = ok("transmit", "transmit_simple");
    let (h, rows) = table(&dir.path().join("spectrum.csv"));
    let (w, t2, r2) = (column(&h, "omega"), column(&h, "t_abs2"), column(&h, "r_abs2"));
    let row = rows.iter().find(|r| r[w] == Some(0.0)).expect("resonance row");
    assert!((row[t2].unwrap() - 1.0).abs() < 1e-12);
    // Lorentzian 1/(1 + (2ω/(γ+Γ))²) with γ = Γ = 1.
    for r in &rows {
        let x = r[w].unwrap();
        assert!((r[t2].unwrap() - 1.0 / (1.0 + x * x)).abs() < 1e-12);
        assert!((r[t2].unwrap() + r[r2].unwrap() - 1.0).abs() < 1e-12);
    }
    let report = json(&dir, "report.json");
    assert_eq!(report["perfect_transmission_count"], 1);
    assert!((report["metrics"]["bandwidth"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((report["metrics"]["accumulated_phase"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-5);
}

#[test]
fn grid_points_flag_overrides_the_config() {
    let (out, dir) = run_preset("transmit", "transmit_simple", &["--grid-points", "101"]);
    assert!(out.status.success());
    assert_eq!(table(&dir.path().join("spectrum.csv")).1.len(), 101);
}

#[test]
fn series_comb_has_seventy_perfect_frequencies() {
    let dir = ok("transmit", "transmit_series_comb");
    assert_eq!(json(&dir, "report.json")["perfect_transmission_count"], 70);
    let (_, peaks) = table(&dir.path().join("peaks.csv"));
    assert_eq!(peaks.len(), 70);
    assert!(peaks
        .iter()
        .all(|p| p[1].unwrap() > 1.0 - 1e-6 && p[0].unwrap().abs() < 10.0));
}

#[test]
fn parallel_network_reports_its_resonances() {
    let dir = ok("transmit", "transmit_parallel");
    let report = json(&dir, "report.json");
    let peaks: Vec<f64> = report["perfect_transmission"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(peaks.len(), 5);
    for (p, w) in peaks.iter().zip([-4.0, -2.0, 0.0, 2.0, 4.0]) {
        assert!((p - w).abs() < 1e-6);
    }
    // π of transmitted phase per state.
    let phase = report["metrics"]["accumulated_phase"].as_f64().unwrap();
    assert!((phase - 5.0 * std::f64::consts::PI).abs() < 1e-5);
}

#[test]
fn lossy_network_reports_the_side_channel() {
    let dir = ok("transmit", "transmit_lossy_series");
    let (h, rows) = table(&dir.path().join("spectrum.csv"));
    let (t2, r2, d2) = (column(&h, "t_abs2"), column(&h, "r_abs2"), column(&h, "side_abs2"));
    for r in &rows {
        assert!((r[t2].unwrap() + r[r2].unwrap() + r[d2].unwrap() - 1.0).abs() < 1e-9);
    }
    assert_eq!(json(&dir, "report.json")["perfect_transmission_count"], 0);
}

#[test]
fn network_files_resolve_relative_to_the_config() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("net.json"),
        r#"{"topology": {"kind": "simple"}, "states": [{"omega": 1.0, "gamma_in": 1.0, "gamma_out": 1.0}]}"#,
    )
    .unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"network": {"kind": "file", "path": "net.json"}, "grid": {"kind": "uniform", "start": 0, "end": 2, "points": 201}, "metrics": {"enabled": false}}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = pdk(
        &[
            "transmit",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!((report["perfect_transmission"][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn gaussian_schedule_matches_the_closed_form() {
    let dir = ok("wavepacket", "wavepacket_gaussian");
    let pulse = GaussianPulse {
        t0: 0.0,
        sigma: 1.0,
        omega0: 0.5,
    };
    let big_t = 3.0;
    let (h, rows) = table(&dir.path().join("schedule.csv"));
    let (t, k, d) = (column(&h, "t"), column(&h, "kappa"), column(&h, "detuning"));
    assert_eq!(rows.last().unwrap()[t], Some(big_t));
    for r in &rows {
        let x = r[t].unwrap();
        let expected = pulse.amplitude(x).powi(2) / (pulse.mass_before(x) + pulse.mass_after(big_t));
        assert!((r[k].unwrap() - expected).abs() < 1e-8, "t = {x}");
        assert!((r[d].unwrap() - 0.5).abs() < 1e-8);
    }
    let report = json(&dir, "report.json");
    assert!(report["round_trip_error"].as_f64().unwrap() < 1e-8);
    assert!((report["weight"].as_f64().unwrap() - (1.0 - pulse.mass_after(big_t))).abs() < 1e-9);
}

#[test]
fn window_ending_before_the_pulse_is_infeasible() {
    let (out, _dir) = run_preset("wavepacket", "wavepacket_infeasible", &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = error_json(&out);
    assert_eq!(err["class"], "infeasible");
    assert!(err["message"].as_str().unwrap().contains("target extends past T"));
}

#[test]
fn orthogonal_pulse_does_not_overlap_its_base() {
    let dir = ok("wavepacket", "wavepacket_orthogonal");
    let report = json(&dir, "report.json");
    assert!(report["base_overlap"].as_f64().unwrap() < 1e-8);
    assert!(report["weight"].as_f64().unwrap() > 1.0 - 1e-5);
}

#[test]
fn sweep_columns_follow_the_closed_forms() {
    let dir = ok("amplify", "amplify_sweep");
    let (h, rows) = table(&dir.path().join("sweep.csv"));
    let (g, sm, gm, mssm) = (
        column(&h, "G"),
        column(&h, "single_mode_snr"),
        column(&h, "g_modes_snr"),
        column(&h, "multi_step_single_mode_snr"),
    );
    let (nbar, n_a) = (0.5f64, 1.0);
    let dnb = (nbar * (nbar + 1.0)).sqrt();
    for r in &rows {
        let gain = r[g].unwrap();
        let expected = gain * n_a / dnb;
        assert!((r[sm].unwrap() - expected).abs() < 1e-12 * expected);
        assert!((r[gm].unwrap() - expected / gain.sqrt()).abs() < 1e-12 * expected);
        // Cascades of two-fold steps exist for every gain above one.
        assert_eq!(r[mssm].is_some(), gain >= 2.0);
    }
    let mc = column(&h, "mc_single_mode_variance");
    assert_eq!(rows.iter().filter(|r| r[mc].is_some()).count(), 7);
    assert!(json(&dir, "report.json")["monte_carlo"]["max_abs_z"].as_f64().unwrap() < 3.0);
}

#[test]
fn single_step_cascades_equal_the_single_step_maps() {
    let dir = ok("amplify", "amplify_single_step");
    let (h, rows) = table(&dir.path().join("sweep.csv"));
    for (multi, single) in [
        ("multi_step_single_mode", "single_mode"),
        ("multi_step_multi_mode", "g_modes"),
    ] {
        for suffix in ["variance", "snr"] {
            let (a, b) = (
                column(&h, &format!("{multi}_{suffix}")),
                column(&h, &format!("{single}_{suffix}")),
            );
            for r in &rows {
                let (x, y) = (r[a].unwrap(), r[b].unwrap());
                assert!((x - y).abs() <= 1e-14 * y.abs());
            }
        }
    }
}

#[test]
fn ideal_detector_has_unit_single_photon_weight() {
    let dir = ok("povm", "povm_ideal");
    let e = &json(&dir, "report.json")["element"];
    assert_eq!(e["w0"].as_f64().unwrap(), 0.0);
    assert!((e["wT"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((e["purity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let (_, state) = table(&dir.path().join("state.csv"));
    assert!(!state.is_empty());
}

#[test]
fn efficiency_fluctuations_keep_the_projected_state() {
    let dir = ok("povm", "povm_eta_fluctuation");
    let report = json(&dir, "report.json");
    let f = &report["fluctuation"];
    assert_eq!(f["rank"], 1);
    assert!((f["leading_state_overlap"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    // The η average stays near the nominal weight.
    let (nominal, mixed) = (report["element"]["wT"].as_f64().unwrap(), f["wT"].as_f64().unwrap());
    assert!(mixed > 0.0 && mixed < 1.0 && (mixed - nominal).abs() < 0.1);
    assert!(
        (f["uncertainty"]["product"].as_f64().unwrap() - report["uncertainty"]["product"].as_f64().unwrap()).abs()
            < 1e-9
    );
}

#[test]
fn timing_jitter_mixes_the_projected_state() {
    let dir = ok("povm", "povm_timing_jitter");
    let report = json(&dir, "report.json");
    let f = &report["fluctuation"];
    assert!(f["rank"].as_u64().unwrap() > 1);
    assert!(f["purity"].as_f64().unwrap() < report["element"]["purity"].as_f64().unwrap());
    // Jitter in T does not change the weights.
    assert!((f["wT"].as_f64().unwrap() - report["element"]["wT"].as_f64().unwrap()).abs() < 1e-12);
    assert!(f["uncertainty"]["delta_t"].as_f64().unwrap() > report["uncertainty"]["delta_t"].as_f64().unwrap());
}

#[test]
fn gaussian_trigger_saturates_the_entropic_bound() {
    let dir = ok("povm", "povm_entropic");
    let product = json(&dir, "report.json")["uncertainty"]["product"].as_f64().unwrap();
    assert!((product - std::f64::consts::E * std::f64::consts::PI).abs() < 1e-3);
}

#[test]
fn super_resolution_prints_an_estimate() {
    let (out, dir) = run_preset("povm", "povm_super_resolution", &[]);
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    let rest = line.trim().strip_prefix("epsilon_hat = ").expect("estimate line");
    let (est, err) = rest.split_once(" +/- ").unwrap();
    let (est, err): (f64, f64) = (est.parse().unwrap(), err.parse().unwrap());
    assert!(err > 0.0 && (est - 0.1).abs() < 4.0 * err);
    assert_eq!(
        json(&dir, "report.json")["super_resolution"]["estimate"]
            .as_f64()
            .unwrap(),
        est
    );
}

#[test]
fn two_state_design_transmits_perfectly() {
    let dir = ok("design", "design_two_state");
    let d = &json(&dir, "design.json")["two_state"];
    // γ = 1, Γ = 2, ω₁ = 0, ω₂ = 1.
    let (gamma, big_gamma, w1, w2) = (1.0f64, 2.0f64, 0.0f64, 1.0f64);
    let omega = (big_gamma * w1 - gamma * w2) / (big_gamma - gamma);
    let g = (gamma * big_gamma / 4.0 + gamma * big_gamma * (w1 - w2).powi(2) / (big_gamma - gamma).powi(2)).sqrt();
    assert!((d["omega_star"].as_f64().unwrap() - omega).abs() < 1e-12);
    assert!((d["g"].as_f64().unwrap() - g).abs() < 1e-12);
    assert!((d["t_abs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn balanced_detuned_pair_is_infeasible() {
    let (out, _dir) = run_preset("design", "design_balanced_detuned", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["class"], "infeasible");
}

#[test]
fn band_gap_target_reports_the_offending_frequency() {
    let (out, _dir) = run_preset("design", "design_band_gap", &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = error_json(&out);
    assert_eq!(err["error"], "band_gap");
    assert!(err["omega"].as_f64().unwrap().abs() < 0.01);
}

#[test]
fn mode_matching_through_a_lorentzian_is_exact() {
    let dir = ok("design", "design_mode_matching");
    let d = json(&dir, "design.json");
    assert!((d["mode_matching"]["efficiency_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(d["peaks"]["count"], 5);
    assert!(dir.path().join("matched_trigger.csv").exists());
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    for (command, name) in [
        ("amplify", "amplify_sweep"),
        ("transmit", "transmit_parallel"),
        ("povm", "povm_timing_jitter"),
    ] {
        let a = ok(command, name);
        let b = TempDir::new().unwrap();
        let config = preset(name);
        let out = pdk(
            &[
                command,
                "--config",
                config.to_str().unwrap(),
                "--out",
                b.path().to_str().unwrap(),
            ],
            &[("PDK_THREADS", "1")],
        );
        assert!(out.status.success());
        assert_eq!(snapshot(a.path()), snapshot(b.path()), "{name}");
    }
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let (_, a) = run_preset("amplify", "amplify_sweep", &["--seed", "7"]);
    let (_, b) = run_preset("amplify", "amplify_sweep", &["--seed", "8"]);
    let base = ok("amplify", "amplify_sweep");
    assert_eq!(snapshot(a.path()), snapshot(base.path()));
    assert_ne!(
        fs::read(a.path().join("sweep.csv")).unwrap(),
        fs::read(b.path().join("sweep.csv")).unwrap()
    );
}

#[test]
fn unconverged_weight_sums_exit_with_numeric_error() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("povm.json");
    fs::write(
        &config,
        r#"{"element": {
            "trigger": {"target": {"kind": "gaussian", "t0": 0, "sigma": 1}, "detection_time": 6, "points": 1201},
            "filter": {"kind": "unity"},
            "detector": {"eta": 0.5, "click": {"threshold": {"k_min": 1}}, "nbar": 50, "nbar_prime": 0, "gain": 2, "max_n": 5}
        }}"#,
    )
    .unwrap();
    let out = pdk(
        &[
            "povm",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(error_json(&out)["class"], "numeric");
}
