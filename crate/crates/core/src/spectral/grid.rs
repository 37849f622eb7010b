use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing, finite sample points with at least two entries.
///
/// The same type serves for frequencies and times; the aliases
/// [`FrequencyGrid`] and [`TimeGrid`] document intent at call sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    points: Vec<f64>,
}

pub type FrequencyGrid = Grid;
pub type TimeGrid = Grid;

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Grid(format!("need at least 2 points, got {}", points.len())));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::Grid(format!("non-finite point at index {i}")));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "points not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Grid { points })
    }

    /// `n` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 || !(end > start) {
            return Err(Error::Grid(format!(
                "uniform grid needs n >= 2 and end > start (n={n}, start={start}, end={end})"
            )));
        }
        let h = (end - start) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| start + h * i as f64).collect();
        points[n - 1] = end;
        Grid::new(points)
    }

    /// `n` points with spacing `step` centred on `center`; the centre is a
    /// node when `n` is odd.
    pub fn centered(center: f64, step: f64, n: usize) -> Result<Self> {
        if n < 2 || !(step > 0.0) {
            return Err(Error::Grid("centered grid needs n >= 2 and step > 0".into()));
        }
        let half = (n - 1) as f64 / 2.0;
        Grid::new((0..n).map(|i| center + (i as f64 - half) * step).collect())
    }

    /// Adaptive grid for spectra made of Lorentzian-like features.
    ///
    /// Each feature `(center, width)` asks for a local spacing of
    /// `resolution * sqrt(width² + (ω − center)²)`; the grid uses the finest
    /// requested spacing everywhere and spans `[lo, hi]`. A single feature
    /// gives an `asinh`-uniform grid, so tails out to `1e9` widths cost only
    /// a few thousand points per feature.
    pub fn adaptive(features: &[(f64, f64)], lo: f64, hi: f64, resolution: f64) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Grid("adaptive grid needs at least one feature".into()));
        }
        if !(hi > lo) || !(resolution > 0.0) || resolution >= 1.0 {
            return Err(Error::Grid(format!(
                "adaptive grid needs hi > lo and 0 < resolution < 1 (lo={lo}, hi={hi}, resolution={resolution})"
            )));
        }
        if features.iter().any(|&(c, w)| !c.is_finite() || !(w > 0.0)) {
            return Err(Error::Grid("feature widths must be positive and centres finite".into()));
        }
        let step = |x: f64| {
            features
                .iter()
                .map(|&(c, w)| resolution * w.hypot(x - c))
                .fold(f64::INFINITY, f64::min)
        };
        let mut points = vec![lo];
        let mut x = lo;
        loop {
            // Midpoint step keeps the spacing smooth when it varies quickly.
            let h0 = step(x);
            let h = step(x + 0.5 * h0);
            let next = x + h;
            if next >= hi - 0.25 * h {
                break;
            }
            points.push(next);
            x = next;
        }
        points.push(hi);
        Grid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Spacing if the grid is uniform to relative tolerance `rtol`.
    pub fn uniform_step(&self, rtol: f64) -> Option<f64> {
        let n = self.points.len();
        let h = (self.last() - self.first()) / (n - 1) as f64;
        let ok = self.points.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= rtol * h);
        ok.then_some(h)
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        match self.points.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.points.len() => self.points.len() - 1,
            Err(i) => {
                if (x - self.points[i - 1]).abs() <= (self.points[i] - x).abs() {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Grid shifted by a constant offset.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Grid::new(self.points.iter().map(|x| x + offset).collect())
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;
    fn try_from(points: Vec<f64>) -> Result<Self> {
        Grid::new(points)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Vec<f64> {
        g.points
    }
}
