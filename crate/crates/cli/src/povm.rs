use pdk::amplification::{thermal_occupation, PhysicalConstants};
use pdk::network::model_for;
use pdk::povm::{
    assemble_povm, element_purity, entropic_uncertainty, entropic_uncertainty_mixture, fluctuate_povm, mode_overlap,
    super_resolution_estimate, ClickSet, DetectorSpec, Fluctuation, FluctuationSpec, ModeOverlap, PovmElement,
};
use pdk::spectral::SpectralFunction;
use pdk::wavepacket::trigger_spectrum;
use pdk::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{load, NetworkConfig, RunArgs};
use crate::failure::{Failure, Outcome};
use crate::output::OutDir;
use crate::wavepacket::TriggerConfig;

/// A thermal occupation given directly or through a mode frequency and
/// temperature (`ħ = k_B = 1`).
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Occupation {
    Value(f64),
    Thermal { omega: f64, kt: f64 },
}

impl Occupation {
    fn value(self) -> Outcome<f64> {
        Ok(match self {
            Occupation::Value(n) => n,
            Occupation::Thermal { omega, kt } => thermal_occupation(omega, kt, &PhysicalConstants::NATURAL)?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorConfig {
    eta: f64,
    click: ClickSet,
    nbar: Occupation,
    nbar_prime: Occupation,
    gain: u64,
    /// Used only when the trigger weight is not taken from the design.
    #[serde(default)]
    trigger_weight: Option<f64>,
    #[serde(default)]
    truncation: Option<f64>,
    #[serde(default)]
    max_n: Option<u64>,
}

impl DetectorConfig {
    fn build(&self) -> Outcome<DetectorSpec> {
        let mut spec = DetectorSpec::new(
            self.eta,
            self.click.clone(),
            self.nbar.value()?,
            self.nbar_prime.value()?,
            self.gain,
        );
        if let Some(w) = self.trigger_weight {
            spec.trigger_weight = w;
        }
        if let Some(t) = self.truncation {
            spec.truncation = t;
        }
        if let Some(n) = self.max_n {
            spec.max_n = n;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FilterConfig {
    /// No network: `T = 1`, `R = 0`.
    Unity,
    Network {
        network: NetworkConfig,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementConfig {
    trigger: TriggerConfig,
    filter: FilterConfig,
    detector: DetectorConfig,
    /// Number and spacing of the time samples fed to the Fourier transform.
    #[serde(default = "default_spectrum_points")]
    spectrum_points: usize,
    /// Defaults to a tenth of the pulse width.
    #[serde(default)]
    spectrum_step: Option<f64>,
    /// Defaults to the pulse carrier.
    #[serde(default)]
    spectrum_center: Option<f64>,
    /// Scale `w_T` by the designed trigger weight.
    #[serde(default = "yes")]
    use_trigger_weight: bool,
}

fn default_spectrum_points() -> usize {
    8192
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FluctuationConfig {
    parameters: Vec<Fluctuation>,
    samples: usize,
    #[serde(default)]
    strict: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UncertaintyConfig {
    bin_omega: f64,
    bin_t: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuperResolutionConfig {
    epsilon: f64,
    eta: f64,
    trials: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    element: Option<ElementConfig>,
    #[serde(default)]
    fluctuation: Option<FluctuationConfig>,
    #[serde(default)]
    uncertainty: Option<UncertaintyConfig>,
    #[serde(default)]
    super_resolution: Option<SuperResolutionConfig>,
    #[serde(default)]
    seed: Option<u64>,
}

struct Built {
    spec: DetectorSpec,
    overlap: ModeOverlap,
    element: PovmElement,
    detection_time: f64,
}

fn build_element(cfg: &ElementConfig, args: &RunArgs) -> Outcome<(Built, Value)> {
    let trig = cfg.trigger.run(args.grid_points)?;
    let pulse = cfg.trigger.target.pulse();
    let step = match (cfg.spectrum_step, pulse) {
        (Some(s), _) => s,
        (None, Some(p)) => p.sigma / 10.0,
        (None, None) => return Err(Failure::config("spectrum_step is required for tabulated targets")),
    };
    let center = cfg.spectrum_center.or(pulse.map(|p| p.omega0)).unwrap_or(0.0);
    let psi = trigger_spectrum(&trig.amplitude, step, cfg.spectrum_points, center)?;
    let (t, r) = match &cfg.filter {
        FilterConfig::Unity => (
            SpectralFunction::from_fn(psi.grid(), |_| Complex64::new(1.0, 0.0))?,
            SpectralFunction::zeros(psi.grid()),
        ),
        FilterConfig::Network { network } => {
            let res = model_for(&network.build(args.base_dir())?)?.transfer(psi.grid())?;
            (res.t, res.r)
        }
    };
    let detection_time = cfg.trigger.detection_time;
    let overlap = mode_overlap(&psi, &t, &r, detection_time)?;
    let mut spec = cfg.detector.build()?;
    if cfg.use_trigger_weight {
        spec.trigger_weight = trig.amplitude.weight;
    }
    let element = assemble_povm(&spec, &overlap)?;
    let report = json!({
        "w0": element.w0,
        "wT": element.wt,
        "purity": element_purity(&element)?,
        "tau": overlap.tau,
        "rho": overlap.rho,
        "trigger_weight": spec.trigger_weight,
        "nbar": spec.nbar,
        "nbar_prime": spec.nbar_prime,
        "truncation_w0": element.weights.tail_w0,
        "truncation_wT": element.weights.tail_wt,
        "terms": element.weights.terms,
        "spectrum_points": psi.len(),
    });
    Ok((
        Built {
            spec,
            overlap,
            element,
            detection_time,
        },
        report,
    ))
}

fn write_state(out: &OutDir, name: &str, state: &SpectralFunction) -> Outcome<()> {
    let abs2 = state.norm_sqr();
    let peak = abs2.iter().cloned().fold(0.0, f64::max);
    let rows = (0..state.len()).filter(|&i| abs2[i] >= 1e-20 * peak).map(|i| {
        let v = state.values()[i];
        vec![Some(state.points()[i]), Some(v.re), Some(v.im), Some(abs2[i])]
    });
    out.csv(name, &["omega", "re", "im", "abs2"], rows)
}

pub fn run(args: &RunArgs) -> Outcome<()> {
    let cfg: Config = load(&args.config)?;
    if cfg.element.is_none() && cfg.super_resolution.is_none() {
        return Err(Failure::config(
            "povm config needs an element or a super_resolution section",
        ));
    }
    if cfg.element.is_none() && (cfg.fluctuation.is_some() || cfg.uncertainty.is_some()) {
        return Err(Failure::config("fluctuation and uncertainty sections need an element"));
    }
    let seed = args.seed(cfg.seed);
    let out = OutDir::create(&args.out)?;
    let mut report = json!({ "seed": seed });

    if let Some(ecfg) = &cfg.element {
        let (built, element_report) = build_element(ecfg, args)?;
        report["element"] = element_report;
        write_state(&out, "state.csv", &built.element.state)?;
        let mut mixed = None;
        if let Some(f) = &cfg.fluctuation {
            let spec = FluctuationSpec {
                parameters: f.parameters.clone(),
                samples: f.samples,
                seed,
                strict: f.strict,
            };
            let m = fluctuate_povm(&built.spec, &built.overlap, built.detection_time, &spec)?;
            let leading = match m.states.first() {
                Some(s) => Some(s.inner(&built.element.state)?.norm()),
                None => None,
            };
            if let Some(s) = m.states.first() {
                write_state(&out, "fluctuation_state.csv", s)?;
            }
            report["fluctuation"] = json!({
                "w0": m.w0,
                "wT": m.wt,
                "purity": m.purity,
                "eigenvalues": m.eigenvalues.iter().take(16).collect::<Vec<_>>(),
                "rank": m.eigenvalues.len(),
                "leading_state_overlap": leading,
                "samples_used": m.used,
                "samples_skipped": m.skipped.len(),
            });
            mixed = Some(m);
        }
        if let Some(u) = &cfg.uncertainty {
            let single = entropic_uncertainty(&built.element.state, u.bin_omega, u.bin_t)?;
            report["uncertainty"] = serde_json::to_value(single).expect("report serializes");
            if let Some(m) = mixed.as_ref().filter(|m| !m.states.is_empty()) {
                let parts: Vec<(f64, &SpectralFunction)> = m.eigenvalues.iter().cloned().zip(&m.states).collect();
                let mix = entropic_uncertainty_mixture(&parts, u.bin_omega, u.bin_t)?;
                report["fluctuation"]["uncertainty"] = serde_json::to_value(mix).expect("report serializes");
            }
        }
    }

    if let Some(s) = &cfg.super_resolution {
        let r = super_resolution_estimate(s.epsilon, s.eta, s.trials, seed)?;
        println!("epsilon_hat = {} +/- {}", r.estimate, r.stderr);
        report["super_resolution"] = json!({
            "epsilon": s.epsilon,
            "eta": s.eta,
            "trials": s.trials,
            "p1": r.p1,
            "p2": r.p2,
            "n1": r.n1,
            "n2": r.n2,
            "estimate": r.estimate,
            "stderr": r.stderr,
        });
    }
    out.json("report.json", &report)
}
