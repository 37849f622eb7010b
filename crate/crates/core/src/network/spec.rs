//! Serializable description of a network of discrete states coupled to an
//! input continuum, an output continuum and an optional side continuum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One discrete state: resonance and decay rates to the three continua.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteState {
    pub omega: f64,
    #[serde(default)]
    pub gamma_in: f64,
    #[serde(default)]
    pub gamma_out: f64,
    #[serde(default)]
    pub mu: f64,
}

impl DiscreteState {
    pub fn new(omega: f64, gamma_in: f64, gamma_out: f64) -> Self {
        DiscreteState {
            omega,
            gamma_in,
            gamma_out,
            mu: 0.0,
        }
    }

    pub fn with_side_channel(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }
}

/// Real, non-negative coherent coupling between states `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// A single state.
    Simple,
    /// Uncoupled states sharing both continua.
    Parallel,
    /// A nearest-neighbour chain from input (first state) to output (last).
    Series,
    /// Ordered manifolds of states; couplings only between neighbours.
    Hybrid { manifolds: Vec<Vec<usize>> },
    /// Anything else; only the direct solver applies.
    General,
}

/// A network of discrete states plus its topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub topology: Topology,
    pub states: Vec<DiscreteState>,
    #[serde(default)]
    pub couplings: Vec<Coupling>,
}

/// Relative tolerance under which two resonances count as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-12;

pub(crate) fn degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_RTOL * a.abs().max(b.abs()).max(1.0)
}

fn spec_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Spec(msg.into()))
}

impl NetworkSpec {
    pub fn new(topology: Topology, states: Vec<DiscreteState>, couplings: Vec<Coupling>) -> Result<Self> {
        let spec = NetworkSpec {
            topology,
            states,
            couplings,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: NetworkSpec =
            serde_json::from_str(text).map_err(|e| Error::Spec(format!("malformed network JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network spec serializes")
    }

    /// A nearest-neighbour chain with couplings `g[k]` between states `k`
    /// and `k+1`.
    pub fn series(states: Vec<DiscreteState>, g: &[f64]) -> Result<Self> {
        if !states.is_empty() && g.len() + 1 != states.len() {
            return spec_err(format!(
                "series of {} states needs {} couplings, got {}",
                states.len(),
                states.len() - 1,
                g.len()
            ));
        }
        let couplings = g
            .iter()
            .enumerate()
            .map(|(k, &g)| Coupling { i: k, j: k + 1, g })
            .collect();
        NetworkSpec::new(Topology::Series, states, couplings)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn has_side_channel(&self) -> bool {
        self.states.iter().any(|s| s.mu > 0.0)
    }

    /// Coupling strength between `i` and `j` (0 when absent).
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .iter()
            .find(|c| (c.i == i && c.j == j) || (c.i == j && c.j == i))
            .map_or(0.0, |c| c.g)
    }

    /// Structural checks common to all topologies, then the
    /// topology-specific invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n == 0 {
            return Err(Error::EmptyNetwork);
        }
        for (k, s) in self.states.iter().enumerate() {
            if !s.omega.is_finite() {
                return spec_err(format!("state {k}: resonance must be finite"));
            }
            for (name, v) in [("gamma_in", s.gamma_in), ("gamma_out", s.gamma_out), ("mu", s.mu)] {
                if !(v >= 0.0) || !v.is_finite() {
                    return spec_err(format!("state {k}: {name} must be finite and >= 0, got {v}"));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.couplings {
            if c.i >= n || c.j >= n || c.i == c.j {
                return spec_err(format!(
                    "coupling ({}, {}) is not between two distinct states",
                    c.i, c.j
                ));
            }
            if !(c.g >= 0.0) || !c.g.is_finite() {
                return spec_err(format!("coupling ({}, {}) must be real and >= 0", c.i, c.j));
            }
            if !seen.insert((c.i.min(c.j), c.i.max(c.j))) {
                return spec_err(format!("coupling ({}, {}) listed twice", c.i, c.j));
            }
        }
        if self.states.iter().all(|s| s.gamma_in == 0.0) {
            return spec_err("no state couples to the input continuum");
        }
        let active = |c: &&Coupling| c.g > 0.0;
        match &self.topology {
            Topology::Simple => {
                if n != 1 {
                    return spec_err(format!("simple topology has exactly one state, got {n}"));
                }
            }
            Topology::Parallel => {
                if self.couplings.iter().any(|c| c.g > 0.0) {
                    return spec_err("parallel states must be uncoupled");
                }
                for (k, s) in self.states.iter().enumerate() {
                    if !(s.gamma_in > 0.0 && s.gamma_out > 0.0) {
                        return spec_err(format!("parallel state {k} needs gamma_in, gamma_out > 0"));
                    }
                }
                check_nondegenerate(&self.states, &(0..n).collect::<Vec<_>>())?;
            }
            Topology::Series => {
                for (k, s) in self.states.iter().enumerate() {
                    if s.gamma_in > 0.0 && k != 0 {
                        return spec_err(format!(
                            "series state {k}: only the first state may couple to the input"
                        ));
                    }
                    if s.gamma_out > 0.0 && k != n - 1 {
                        return spec_err(format!(
                            "series state {k}: only the last state may couple to the output"
                        ));
                    }
                }
                if let Some(c) = self.couplings.iter().filter(active).find(|c| c.i.abs_diff(c.j) != 1) {
                    return spec_err(format!("series coupling ({}, {}) is not nearest-neighbour", c.i, c.j));
                }
            }
            Topology::Hybrid { manifolds } => {
                let owner = manifold_owner(manifolds, n)?;
                let m = manifolds.len();
                for (k, s) in self.states.iter().enumerate() {
                    if s.gamma_in > 0.0 && owner[k] != 0 {
                        return spec_err(format!("state {k}: only the first manifold may couple to the input"));
                    }
                    if s.gamma_out > 0.0 && owner[k] != m - 1 {
                        return spec_err(format!("state {k}: only the last manifold may couple to the output"));
                    }
                }
                if let Some(c) = self
                    .couplings
                    .iter()
                    .filter(active)
                    .find(|c| owner[c.i].abs_diff(owner[c.j]) != 1)
                {
                    return spec_err(format!("coupling ({}, {}) is not between adjacent manifolds", c.i, c.j));
                }
                for group in manifolds {
                    check_nondegenerate(&self.states, group)?;
                }
            }
            Topology::General => {}
        }
        Ok(())
    }
}

/// Manifold index of every state; the manifolds must partition `0..n`.
pub(crate) fn manifold_owner(manifolds: &[Vec<usize>], n: usize) -> Result<Vec<usize>> {
    if manifolds.is_empty() || manifolds.iter().any(|m| m.is_empty()) {
        return spec_err("hybrid topology needs non-empty manifolds");
    }
    let mut owner = vec![usize::MAX; n];
    for (k, group) in manifolds.iter().enumerate() {
        for &i in group {
            if i >= n {
                return spec_err(format!("manifold {k} refers to missing state {i}"));
            }
            if owner[i] != usize::MAX {
                return spec_err(format!("state {i} belongs to more than one manifold"));
            }
            owner[i] = k;
        }
    }
    if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
        return spec_err(format!("state {i} is in no manifold"));
    }
    Ok(owner)
}

fn check_nondegenerate(states: &[DiscreteState], group: &[usize]) -> Result<()> {
    for (a, &i) in group.iter().enumerate() {
        for &j in &group[a + 1..] {
            if degenerate(states[i].omega, states[j].omega) {
                return spec_err(format!(
                    "states {i} and {j} share the resonance {} within one parallel manifold",
                    states[i].omega
                ));
            }
        }
    }
    Ok(())
}
