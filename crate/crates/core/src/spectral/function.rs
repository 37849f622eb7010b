use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::quadrature;
use crate::error::{Error, Result};

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampled {
    grid: Grid,
    values: Vec<Complex64>,
}

/// `T(ω)`, `R(ω)`, `Ψ̃(ω)` and other frequency-domain amplitudes.
pub type SpectralFunction = Sampled;
/// `Ψ(t)`, `f(t)` and other time-domain amplitudes.
pub type TemporalFunction = Sampled;

impl Sampled {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite value at grid point {} ({})",
                i,
                grid.points()[i]
            )));
        }
        Ok(Sampled { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Sampled::new(grid.clone(), values)
    }

    pub fn from_real(grid: &Grid, values: &[f64]) -> Result<Self> {
        Sampled::new(grid.clone(), values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: &Grid) -> Self {
        Sampled {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn points(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|f|²` at every point.
    pub fn norm_sqr(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Pointwise map keeping the grid.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Sampled::new(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Sampled {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise product; both functions must share a grid.
    pub fn product(&self, other: &Sampled) -> Result<Self> {
        self.require_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Sampled::new(self.grid.clone(), values)
    }

    pub fn conj(&self) -> Self {
        Sampled {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// `∫ f` by fourth-order quadrature.
    pub fn integral(&self) -> Complex64 {
        quadrature::integrate_complex(self.grid.points(), &self.values)
    }

    /// `∫ |f|²`.
    pub fn norm_sqr_integral(&self) -> f64 {
        quadrature::integrate(self.grid.points(), &self.norm_sqr())
    }

    /// `⟨self|other⟩ = ∫ self* other`.
    pub fn inner(&self, other: &Sampled) -> Result<Complex64> {
        self.require_same_grid(other)?;
        let prod: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(quadrature::integrate_complex(self.grid.points(), &prod))
    }

    /// Copy scaled to unit L2 norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr_integral();
        if !(n > 0.0) {
            return Err(Error::Parameter("cannot normalize a zero function".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Polynomial interpolation onto another grid; zero outside this grid.
    pub fn resample(&self, grid: &Grid) -> Result<Self> {
        let x = self.grid.points();
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
        let (lo, hi) = (self.grid.first(), self.grid.last());
        Sampled::from_fn(grid, |t| {
            if t < lo || t > hi {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(quadrature::interpolate(x, &re, t), quadrature::interpolate(x, &im, t))
            }
        })
    }

    pub fn require_same_grid(&self, other: &Sampled) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Parameter("functions are sampled on different grids".into()));
        }
        Ok(())
    }
}
