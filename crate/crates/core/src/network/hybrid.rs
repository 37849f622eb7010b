use num_complex::Complex64;

use super::chain::{chain_amplitudes, HUGE};
use super::spec::{manifold_owner, NetworkSpec, Topology};
use super::{Amplitudes, Transmission};
use crate::error::{Error, Result};

/// Relative tolerance for the structural conditions of the closed forms.
const RTOL: f64 = 1e-12;

/// Which closed form a hybrid network is reduced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridMode {
    /// Per-state rates `r_i` with `g_ij = √(r_i r_j)/2` between adjacent
    /// manifolds, `r_i = γ_i` in the first and `Γ_i = κ r_i` in the last.
    UniformlyUnbalanced,
    /// Equal `γ` (first manifold), equal `Γ` (last manifold) and one
    /// coupling strength between every pair of adjacent manifolds.
    Homogeneous,
}

/// Manifolds of uncoupled states, each coupled only to its neighbours.
///
/// Both closed forms collapse every manifold to a single effective site,
/// leaving a chain whose diagonal carries the manifold response
/// `h_k = Σ r_i/(2Δ_i)` (unbalanced) or `f_k = Σ 1/Δ_i` (homogeneous).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridNetwork {
    mode: HybridMode,
    /// Resonances and weights per manifold (`r_i` or 1).
    manifolds: Vec<Vec<(f64, f64)>>,
    /// Real part of each effective site's diagonal.
    loss: Vec<f64>,
    couplings: Vec<f64>,
    s_in: f64,
    s_out: f64,
}

fn spec_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Spec(msg.into()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RTOL * a.abs().max(b.abs())
}

impl HybridNetwork {
    pub fn from_spec(spec: &NetworkSpec, mode: HybridMode) -> Result<Self> {
        let Topology::Hybrid { manifolds } = &spec.topology else {
            return spec_err("hybrid closed form needs a hybrid topology");
        };
        spec.validate()?;
        if spec.has_side_channel() {
            return spec_err("the hybrid closed forms have no side channel");
        }
        manifold_owner(manifolds, spec.len())?;
        if manifolds.iter().flatten().any(|&i| {
            manifolds
                .iter()
                .any(|m| m.contains(&i) && m.iter().any(|&j| j != i && spec.coupling(i, j) > 0.0))
        }) {
            return spec_err("states within a manifold must be uncoupled");
        }
        match mode {
            HybridMode::Homogeneous => Self::homogeneous(spec, manifolds),
            HybridMode::UniformlyUnbalanced => Self::unbalanced(spec, manifolds),
        }
    }

    fn homogeneous(spec: &NetworkSpec, manifolds: &[Vec<usize>]) -> Result<Self> {
        let m = manifolds.len();
        let st = &spec.states;
        let gamma = st[manifolds[0][0]].gamma_in;
        let big_gamma = st[manifolds[m - 1][0]].gamma_out;
        if !(gamma > 0.0 && big_gamma > 0.0) {
            return spec_err("homogeneous hybrid needs gamma > 0 and Gamma > 0");
        }
        if manifolds[0].iter().any(|&i| !close(st[i].gamma_in, gamma)) {
            return spec_err("input decays differ within the first manifold");
        }
        if manifolds[m - 1].iter().any(|&i| !close(st[i].gamma_out, big_gamma)) {
            return spec_err("output decays differ within the last manifold");
        }
        let mut couplings = Vec::with_capacity(m - 1);
        for k in 0..m - 1 {
            let g = spec.coupling(manifolds[k][0], manifolds[k + 1][0]);
            for &i in &manifolds[k] {
                for &j in &manifolds[k + 1] {
                    if !close(spec.coupling(i, j), g) {
                        return spec_err(format!("couplings between manifolds {k} and {} are not uniform", k + 1));
                    }
                }
            }
            couplings.push(g);
        }
        let mut loss = vec![0.0; m];
        loss[0] += 0.5 * gamma;
        loss[m - 1] += 0.5 * big_gamma;
        Ok(HybridNetwork {
            mode: HybridMode::Homogeneous,
            manifolds: manifolds
                .iter()
                .map(|g| g.iter().map(|&i| (st[i].omega, 1.0)).collect())
                .collect(),
            loss,
            couplings,
            s_in: gamma.sqrt(),
            s_out: big_gamma.sqrt(),
        })
    }

    fn unbalanced(spec: &NetworkSpec, manifolds: &[Vec<usize>]) -> Result<Self> {
        let m = manifolds.len();
        let st = &spec.states;
        let mut rates: Vec<Vec<f64>> = Vec::with_capacity(m);
        let first: Vec<f64> = manifolds[0].iter().map(|&i| st[i].gamma_in).collect();
        if first.iter().any(|&r| !(r > 0.0)) {
            return spec_err("every state of the first manifold needs gamma_in > 0");
        }
        rates.push(first);
        // Propagate r along the chain: g_ij² = r_i r_j / 4 must be rank one.
        for k in 0..m - 1 {
            let prev = &rates[k];
            let (i0, r0) = (manifolds[k][0], prev[0]);
            let next: Vec<f64> = manifolds[k + 1]
                .iter()
                .map(|&j| 4.0 * spec.coupling(i0, j).powi(2) / r0)
                .collect();
            if next.iter().any(|&r| !(r > 0.0)) {
                return spec_err(format!("manifolds {k} and {} are not fully coupled", k + 1));
            }
            for (a, &i) in manifolds[k].iter().enumerate() {
                for (b, &j) in manifolds[k + 1].iter().enumerate() {
                    let expect = (prev[a] * next[b]).sqrt() / 2.0;
                    if !close(spec.coupling(i, j), expect) {
                        return spec_err(format!("coupling ({i}, {j}) breaks the uniformly unbalanced structure"));
                    }
                }
            }
            rates.push(next);
        }
        let last = &manifolds[m - 1];
        let kappa = st[last[0]].gamma_out / rates[m - 1][0];
        if !(kappa > 0.0) {
            return spec_err("the last manifold needs gamma_out > 0");
        }
        for (b, &i) in last.iter().enumerate() {
            if !close(st[i].gamma_out, kappa * rates[m - 1][b]) {
                return spec_err(format!(
                    "state {i}: output decay ratio differs within the last manifold"
                ));
            }
        }
        let mut loss = vec![0.0; m];
        loss[0] += 0.5;
        loss[m - 1] += 0.5 * kappa;
        Ok(HybridNetwork {
            mode: HybridMode::UniformlyUnbalanced,
            manifolds: manifolds
                .iter()
                .zip(&rates)
                .map(|(g, r)| g.iter().zip(r).map(|(&i, &r)| (st[i].omega, r)).collect())
                .collect(),
            loss,
            couplings: vec![0.5; m - 1],
            s_in: 1.0,
            s_out: kappa.sqrt(),
        })
    }

    pub fn mode(&self) -> HybridMode {
        self.mode
    }

    /// `1/Σ w_i/Δ_i`, the reciprocal manifold response (`1/(2h_k)` or
    /// `1/f_k`).
    fn inverse_response(&self, k: usize, omega: f64) -> f64 {
        let mut f = 0.0;
        for &(w, weight) in &self.manifolds[k] {
            let delta = omega - w;
            if delta == 0.0 {
                return 0.0;
            }
            f += weight / delta;
        }
        if f == 0.0 {
            HUGE
        } else {
            1.0 / f
        }
    }
}

impl Transmission for HybridNetwork {
    fn amplitudes(&self, omega: f64) -> Result<Amplitudes> {
        let diag: Vec<Complex64> = (0..self.manifolds.len())
            .map(|k| Complex64::new(self.loss[k], -self.inverse_response(k, omega)))
            .collect();
        let (r, t) = chain_amplitudes(omega, &diag, &self.couplings, self.s_in, self.s_out)?;
        Ok(Amplitudes {
            r,
            t,
            side: Complex64::new(0.0, 0.0),
        })
    }
}
