use std::fs;
use std::path::{Path, PathBuf};

use pdk::network::{Coupling, DiscreteState, NetworkSpec, Topology};
use pdk::spectral::Grid;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::failure::{Failure, Outcome};

/// Parsed command-line arguments shared by every command.
pub struct RunArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub grid_points: Option<usize>,
}

impl RunArgs {
    /// Command-line seed, then the config's, then zero.
    pub fn seed(&self, from_config: Option<u64>) -> u64 {
        self.seed.or(from_config).unwrap_or(0)
    }

    /// Directory that relative paths inside the config are resolved against.
    pub fn base_dir(&self) -> &Path {
        self.config.parent().unwrap_or(Path::new("."))
    }
}

fn read_text(path: &Path) -> Outcome<String> {
    if !path.is_file() {
        return Err(Failure::ConfigNotFound(path.display().to_string()));
    }
    fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

/// Frequency grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    Uniform {
        start: f64,
        end: f64,
        points: usize,
    },
    /// Refined around each feature; features default to the network's
    /// resonances with their linewidths.
    Adaptive {
        lo: f64,
        hi: f64,
        resolution: f64,
        #[serde(default)]
        features: Vec<(f64, f64)>,
    },
}

impl GridConfig {
    pub fn build(&self, spec: &NetworkSpec, points_override: Option<usize>) -> Outcome<Grid> {
        Ok(match self {
            GridConfig::Uniform { start, end, points } => {
                Grid::uniform(*start, *end, points_override.unwrap_or(*points))?
            }
            GridConfig::Adaptive {
                lo,
                hi,
                resolution,
                features,
            } => {
                let features = if features.is_empty() {
                    network_features(spec)
                } else {
                    features.clone()
                };
                Grid::adaptive(&features, *lo, *hi, *resolution)?
            }
        })
    }
}

/// `(ω, width)` for every state; the width includes the decays into both
/// continua, the side channel and the couplings to neighbours.
pub fn network_features(spec: &NetworkSpec) -> Vec<(f64, f64)> {
    spec.states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let coupled: f64 = spec
                .couplings
                .iter()
                .filter(|c| c.i == k || c.j == k)
                .map(|c| 2.0 * c.g.abs())
                .sum();
            let width = s.gamma_in + s.gamma_out + 2.0 * s.mu + coupled;
            (s.omega, if width > 0.0 { width } else { 1.0 })
        })
        .collect()
}

/// A network given inline, by file, or by one of the common families.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkConfig {
    Spec {
        spec: NetworkSpec,
    },
    /// Path to a JSON network spec, relative to the config file.
    File {
        path: PathBuf,
    },
    Simple {
        omega: f64,
        gamma: f64,
        big_gamma: f64,
    },
    /// `n` identical states in a chain with equal couplings `g`.
    UniformSeries {
        n: usize,
        omega: f64,
        gamma: f64,
        big_gamma: f64,
        g: f64,
    },
    /// Uncoupled states at `omegas`, all with the same decays.
    Parallel {
        omegas: Vec<f64>,
        gamma: f64,
        big_gamma: f64,
    },
}

impl NetworkConfig {
    pub fn build(&self, base: &Path) -> Outcome<NetworkSpec> {
        let spec = match self {
            NetworkConfig::Spec { spec } => spec.clone(),
            NetworkConfig::File { path } => {
                let path = base.join(path);
                let text = read_text(&path)?;
                NetworkSpec::from_json(&text)?
            }
            NetworkConfig::Simple {
                omega,
                gamma,
                big_gamma,
            } => NetworkSpec {
                topology: Topology::Simple,
                states: vec![DiscreteState::new(*omega, *gamma, *big_gamma)],
                couplings: vec![],
            },
            NetworkConfig::UniformSeries {
                n,
                omega,
                gamma,
                big_gamma,
                g,
            } => {
                if *n == 0 {
                    return Err(Failure::config("uniform_series needs n >= 1"));
                }
                let states = (0..*n)
                    .map(|k| {
                        let gi = if k == 0 { *gamma } else { 0.0 };
                        let go = if k == n - 1 { *big_gamma } else { 0.0 };
                        DiscreteState::new(*omega, gi, go)
                    })
                    .collect();
                NetworkSpec::series(states, &vec![*g; n - 1])?
            }
            NetworkConfig::Parallel {
                omegas,
                gamma,
                big_gamma,
            } => NetworkSpec {
                topology: Topology::Parallel,
                states: omegas
                    .iter()
                    .map(|&w| DiscreteState::new(w, *gamma, *big_gamma))
                    .collect(),
                couplings: Vec::<Coupling>::new(),
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}
