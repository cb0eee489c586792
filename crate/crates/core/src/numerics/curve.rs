use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("curve has {energies} energies but {values} values")]
    LengthMismatch { energies: usize, values: usize },
    #[error("energies not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("sampling needs at least 2 points and lo < hi")]
    BadGrid,
}

/// A real function sampled on a strictly increasing energy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct Curve {
    energies: Vec<f64>,
    values: Vec<f64>,
    pub label: String,
}

// Deserialization goes through `Curve::new` so invariants hold.
#[derive(Deserialize)]
struct RawCurve {
    energies: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TryFrom<RawCurve> for Curve {
    type Error = CurveError;

    fn try_from(raw: RawCurve) -> Result<Self, Self::Error> {
        Curve::new(raw.label, raw.energies, raw.values)
    }
}

impl Curve {
    pub fn new(label: impl Into<String>, energies: Vec<f64>, values: Vec<f64>) -> Result<Self, CurveError> {
        if energies.len() != values.len() {
            return Err(CurveError::LengthMismatch {
                energies: energies.len(),
                values: values.len(),
            });
        }
        for (i, w) in energies.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(CurveError::NotIncreasing(i + 1));
            }
        }
        if let Some(i) = energies
            .iter()
            .zip(&values)
            .position(|(e, v)| !e.is_finite() || !v.is_finite())
        {
            return Err(CurveError::NonFinite(i));
        }
        Ok(Self {
            energies,
            values,
            label: label.into(),
        })
    }

    /// `n` uniformly spaced samples of `f` on `[lo, hi]`, endpoints included.
    pub fn from_fn<F>(label: impl Into<String>, lo: f64, hi: f64, n: usize, f: F) -> Result<Self, CurveError>
    where
        F: Fn(f64) -> f64,
    {
        let grid = uniform_grid(lo, hi, n).ok_or(CurveError::BadGrid)?;
        let values = grid.iter().map(|&e| f(e)).collect();
        Self::new(label, grid, values)
    }

    /// Fallible counterpart of [`Curve::from_fn`].
    pub fn try_from_fn<F, E>(label: impl Into<String>, lo: f64, hi: f64, n: usize, f: F) -> Result<Self, E>
    where
        F: Fn(f64) -> Result<f64, E>,
        E: From<CurveError>,
    {
        let grid = uniform_grid(lo, hi, n).ok_or(CurveError::BadGrid)?;
        let values = grid.iter().map(|&e| f(e)).collect::<Result<Vec<_>, E>>()?;
        Ok(Self::new(label, grid, values)?)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        Some((*self.energies.first()?, *self.energies.last()?))
    }

    /// Largest spacing between adjacent samples.
    pub fn max_step(&self) -> f64 {
        self.energies.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Piecewise-linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, e: f64) -> Option<f64> {
        let (lo, hi) = self.range()?;
        if e < lo || e > hi {
            return None;
        }
        let idx = self.energies.partition_point(|&x| x <= e);
        if idx == 0 {
            return Some(self.values[0]);
        }
        if idx >= self.len() {
            return Some(*self.values.last()?);
        }
        let (e0, e1) = (self.energies[idx - 1], self.energies[idx]);
        let (v0, v1) = (self.values[idx - 1], self.values[idx]);
        Some(v0 + (v1 - v0) * (e - e0) / (e1 - e0))
    }

    /// Trapezoidal integral over the whole curve.
    pub fn trapezoid(&self) -> f64 {
        self.energies
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(e, v)| 0.5 * (e[1] - e[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// `n` points from `lo` to `hi` inclusive, computed as `lo + i*h` so that a
/// grid of `2n-1` points reproduces every node of the `n`-point grid.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Option<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return None;
    }
    let h = (hi - lo) / (n - 1) as f64;
    Some(
        (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + h * i as f64 })
            .collect(),
    )
}
