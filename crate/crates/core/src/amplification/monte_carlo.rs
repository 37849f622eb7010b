use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;

use super::AmplifierKind;
use crate::error::{param, Error, Result};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 10_000;

/// Empirical output statistics with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloStats {
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
    pub variance_stderr: f64,
    pub samples: usize,
}

/// Samples the ideal nonlinear map on a Fock input of `n_a` photons with
/// thermal reservoir modes of mean occupation `nbar`.
///
/// `SingleMode` adds `G n_a` to one reservoir mode; `GModes` adds `n_a` to
/// each of `G` independent reservoir modes and sums them. `source_quanta`,
/// when given, is the energy reservoir size `M`, which must cover `G n_a`.
pub fn monte_carlo_ideal(
    kind: AmplifierKind,
    gain: u64,
    n_a: u64,
    nbar: f64,
    samples: usize,
    seed: u64,
    source_quanta: Option<u64>,
) -> Result<MonteCarloStats> {
    if !matches!(kind, AmplifierKind::SingleMode | AmplifierKind::GModes) {
        return param("Monte Carlo covers the single-mode and G-mode maps only");
    }
    if gain < 1 {
        return param("gain must be >= 1");
    }
    if samples < MIN_SAMPLES {
        return param(format!("need at least {MIN_SAMPLES} samples, got {samples}"));
    }
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return param(format!("thermal occupation must be finite and >= 0, got {nbar}"));
    }
    if let Some(m) = source_quanta {
        if m < gain * n_a {
            return param(format!(
                "energy source of {m} quanta cannot supply G*n = {}",
                gain * n_a
            ));
        }
    }
    let law = Geometric::new(1.0 / (nbar + 1.0)).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = match kind {
        AmplifierKind::SingleMode => 1,
        _ => gain,
    };
    let signal = (gain * n_a) as f64;
    let draws: Vec<f64> = (0..samples)
        .map(|_| (0..modes).map(|_| law.sample(&mut rng) as f64).sum::<f64>() + signal)
        .collect();
    let n = samples as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in &draws {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let variance = m2 / (n - 1.0);
    let mu4 = m4 / n;
    let var_of_var = ((mu4 - variance * variance * (n - 3.0) / (n - 1.0)) / n).max(0.0);
    Ok(MonteCarloStats {
        mean,
        variance,
        mean_stderr: (variance / n).sqrt(),
        variance_stderr: var_of_var.sqrt(),
        samples,
    })
}
