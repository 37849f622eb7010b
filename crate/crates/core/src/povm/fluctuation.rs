use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::element::ModeOverlap;
use super::weights::{povm_weights, DetectorSpec};
use crate::error::{param, Error, Result};
use crate::spectral::{quadrature, SpectralFunction};

/// Eigenvalues of the single-photon block below this are dropped.
pub const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluctuatedParameter {
    Eta,
    Nbar,
    NbarPrime,
    DetectionTime,
    Gain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterDistribution {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, std: f64 },
    Discrete { values: Vec<f64>, probabilities: Vec<f64> },
    Fixed { value: f64 },
}

enum Sampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
    Discrete(Vec<f64>, WeightedIndex<f64>),
    Fixed(f64),
}

impl Sampler {
    fn new(d: &ParameterDistribution) -> Result<Self> {
        let bad = |e: &dyn std::fmt::Display| Error::Parameter(format!("invalid distribution: {e}"));
        Ok(match d {
            ParameterDistribution::Uniform { low, high } if low == high => Sampler::Fixed(*low),
            ParameterDistribution::Uniform { low, high } => {
                Sampler::Uniform(Uniform::new_inclusive(*low, *high).map_err(|e| bad(&e))?)
            }
            ParameterDistribution::Normal { mean, std: s } if *s == 0.0 => Sampler::Fixed(*mean),
            ParameterDistribution::Normal { mean, std: s } => {
                Sampler::Normal(Normal::new(*mean, *s).map_err(|e| bad(&e))?)
            }
            ParameterDistribution::Discrete { values, probabilities } => {
                if values.len() != probabilities.len() || values.is_empty() {
                    return param("discrete distribution needs matching, non-empty values and probabilities");
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return param(format!("discrete probabilities sum to {total}, not 1"));
                }
                Sampler::Discrete(values.clone(), WeightedIndex::new(probabilities).map_err(|e| bad(&e))?)
            }
            ParameterDistribution::Fixed { value } => Sampler::Fixed(*value),
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Uniform(u) => u.sample(rng),
            Sampler::Normal(n) => n.sample(rng),
            Sampler::Discrete(v, w) => v[w.sample(rng)],
            Sampler::Fixed(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fluctuation {
    pub parameter: FluctuatedParameter,
    pub distribution: ParameterDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSpec {
    pub parameters: Vec<Fluctuation>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Fail on the first invalid sample instead of skipping it.
    #[serde(default)]
    pub strict: bool,
}

/// Fluctuation-averaged element `w̄₀|vac⟩⟨vac| + Σ λ_k |e_k⟩⟨e_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedElement {
    pub w0: f64,
    /// Eigenvalues of the single-photon block, descending.
    pub eigenvalues: Vec<f64>,
    /// Matching normalized eigenstates.
    pub states: Vec<SpectralFunction>,
    /// Mean `w_T` over valid samples (equals `Σ λ_k`).
    pub wt: f64,
    pub purity: f64,
    pub used: usize,
    /// Indices and reasons of skipped samples.
    pub skipped: Vec<(usize, String)>,
}

/// Monte-Carlo average of the element over parameter fluctuations.
///
/// `overlap` is the filter overlap for the nominal `detection_time`; a
/// different detection time only rotates the transmitted state by
/// `e^{iω δT}`. Samples are drawn sequentially from one seeded generator,
/// evaluated in parallel and reduced in sample order.
pub fn fluctuate_povm(
    spec: &DetectorSpec,
    overlap: &ModeOverlap,
    detection_time: f64,
    fluct: &FluctuationSpec,
) -> Result<MixedElement> {
    spec.validate()?;
    if fluct.samples == 0 {
        return param("need at least one sample");
    }
    let samplers: Vec<(FluctuatedParameter, Sampler)> = fluct
        .parameters
        .iter()
        .map(|f| Ok((f.parameter, Sampler::new(&f.distribution)?)))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(fluct.seed);
    let draws: Vec<Vec<(FluctuatedParameter, f64)>> = (0..fluct.samples)
        .map(|_| samplers.iter().map(|(p, s)| (*p, s.sample(&mut rng))).collect())
        .collect();

    let evaluated: Vec<Result<(f64, f64, f64)>> = draws
        .par_iter()
        .map(|draw| {
            let mut s = spec.clone();
            let mut time = detection_time;
            for &(p, v) in draw {
                match p {
                    FluctuatedParameter::Eta => s.eta = v,
                    FluctuatedParameter::Nbar => s.nbar = v,
                    FluctuatedParameter::NbarPrime => s.nbar_prime = v,
                    FluctuatedParameter::DetectionTime => time = v,
                    FluctuatedParameter::Gain => {
                        if !(v >= 1.0) || v.fract() != 0.0 {
                            return param(format!("sampled gain {v} is not an integer >= 1"));
                        }
                        s.gain = v as u64;
                    }
                }
            }
            if !time.is_finite() {
                return param("sampled detection time is not finite");
            }
            let w = povm_weights(&s, overlap.tau, overlap.rho)?;
            Ok((w.w0, w.wt, time))
        })
        .collect();

    let mut skipped = Vec::new();
    let mut valid = Vec::new();
    for (i, r) in evaluated.into_iter().enumerate() {
        match r {
            Ok(v) => valid.push(v),
            Err(e) if fluct.strict => return Err(e),
            Err(e) => skipped.push((i, e.to_string())),
        }
    }
    if valid.is_empty() {
        return Err(Error::Infeasible("every fluctuation sample was invalid".into()));
    }
    let n = valid.len() as f64;
    let w0 = valid.iter().map(|v| v.0).sum::<f64>() / n;
    let wt = valid.iter().map(|v| v.1).sum::<f64>() / n;

    // Group samples that share a detection time (and hence a state).
    let mut groups: Vec<(f64, f64)> = Vec::new();
    for &(_, w, t) in &valid {
        match groups.iter_mut().find(|g| g.0.to_bits() == t.to_bits()) {
            Some(g) => g.1 += w / n,
            None => groups.push((t, w / n)),
        }
    }
    let base = &overlap.transmitted;
    let omega = base.points();
    let qd: Vec<f64> = quadrature::node_weights(omega)
        .iter()
        .zip(base.norm_sqr())
        .map(|(q, d)| q * d)
        .collect();
    let m = groups.len();
    // phases[g][i] = e^{iω_i t_g}
    let phases: Vec<Vec<Complex64>> = groups
        .par_iter()
        .map(|&(t, _)| omega.iter().map(|&w| Complex64::from_polar(1.0, w * t)).collect())
        .collect();
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (a..m)
                .map(|b| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for ((q, pa), pb) in qd.iter().zip(&phases[a]).zip(&phases[b]) {
                        acc += pa.conj() * pb * *q;
                    }
                    acc * (groups[a].1 * groups[b].1).sqrt()
                })
                .collect()
        })
        .collect();
    let gram = DMatrix::from_fn(m, m, |a, b| if b >= a { rows[a][b - a] } else { rows[b][a - b].conj() });
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut eigenvalues = Vec::new();
    let mut states = Vec::new();
    for k in order {
        let lambda = eig.eigenvalues[k];
        if lambda < EIGEN_FLOOR {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let coeff: Vec<Complex64> = groups.iter().enumerate().map(|(g, &(_, w))| v[g] * w.sqrt()).collect();
        let values = (0..omega.len())
            .map(|i| {
                let acc: Complex64 = coeff.iter().zip(&phases).map(|(c, p)| c * p[i]).sum();
                base.values()[i] * acc * Complex64::from_polar(1.0, -omega[i] * detection_time) / lambda.sqrt()
            })
            .collect();
        let state = SpectralFunction::new(base.grid().clone(), values)?;
        eigenvalues.push(lambda);
        states.push(state);
    }
    let trace = w0 + eigenvalues.iter().sum::<f64>();
    let purity = if trace > 0.0 {
        (w0 * w0 + eigenvalues.iter().map(|l| l * l).sum::<f64>()) / (trace * trace)
    } else {
        return Err(Error::Infeasible("fluctuated element has zero trace".into()));
    };
    Ok(MixedElement {
        w0,
        eigenvalues,
        states,
        wt,
        purity,
        used: valid.len(),
        skipped,
    })
}
