use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::spec::NetworkSpec;
use super::{Amplitudes, Transmission};
use crate::error::{Error, Result};

/// Pivot magnitude, relative to the largest pivot, below which the
/// per-frequency system is reported singular.
const PIVOT_RTOL: f64 = 1e-13;

/// Per-frequency LU solve of the full input-output system.
///
/// Works for any topology, including loops and a shared side continuum,
/// and serves as the oracle for the closed forms.
#[derive(Debug, Clone)]
pub struct DirectSolver {
    /// `K + iG`, frequency independent.
    base: DMatrix<Complex64>,
    omegas: Vec<f64>,
    sqrt_in: DVector<Complex64>,
    sqrt_out: DVector<f64>,
    sqrt_side: DVector<f64>,
    side: bool,
}

impl DirectSolver {
    pub fn new(spec: &NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.len();
        let s = &spec.states;
        let a: Vec<f64> = s.iter().map(|x| x.gamma_in.sqrt()).collect();
        let b: Vec<f64> = s.iter().map(|x| x.gamma_out.sqrt()).collect();
        let m: Vec<f64> = s.iter().map(|x| x.mu.sqrt()).collect();
        let mut base = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(0.5 * (a[i] * a[j] + b[i] * b[j] + m[i] * m[j]), 0.0)
        });
        for c in &spec.couplings {
            base[(c.i, c.j)] += Complex64::new(0.0, c.g);
            base[(c.j, c.i)] += Complex64::new(0.0, c.g);
        }
        Ok(DirectSolver {
            base,
            omegas: s.iter().map(|x| x.omega).collect(),
            sqrt_in: DVector::from_iterator(n, a.iter().map(|&v| Complex64::new(v, 0.0))),
            sqrt_out: DVector::from_vec(b),
            sqrt_side: DVector::from_vec(m),
            side: spec.has_side_channel(),
        })
    }

    /// State amplitudes `c(ω)` for unit input amplitude.
    pub fn state_amplitudes(&self, omega: f64) -> Result<DVector<Complex64>> {
        let mut mat = self.base.clone();
        for (i, w) in self.omegas.iter().enumerate() {
            mat[(i, i)] -= Complex64::new(0.0, omega - w);
        }
        let lu = mat.lu();
        let u = lu.u();
        let pivots: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
        let largest = pivots.iter().cloned().fold(0.0, f64::max);
        if pivots.iter().any(|&p| !(p > PIVOT_RTOL * largest)) {
            return Err(Error::Singular { omega });
        }
        let rhs = -&self.sqrt_in;
        lu.solve(&rhs).ok_or(Error::Singular { omega })
    }
}

impl Transmission for DirectSolver {
    fn amplitudes(&self, omega: f64) -> Result<Amplitudes> {
        let c = self.state_amplitudes(omega)?;
        let dot = |w: &DVector<f64>| c.iter().zip(w.iter()).map(|(ci, wi)| ci * wi).sum::<Complex64>();
        let r = 1.0
            + c.iter()
                .zip(self.sqrt_in.iter())
                .map(|(ci, wi)| ci * wi)
                .sum::<Complex64>();
        Ok(Amplitudes {
            r,
            t: dot(&self.sqrt_out),
            side: dot(&self.sqrt_side),
        })
    }

    fn has_side_channel(&self) -> bool {
        self.side
    }
}
