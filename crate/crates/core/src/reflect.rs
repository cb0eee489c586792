//! Reflection from the semi-infinite exponential step
//! `V(x) = V1 + V2 (1 - e^{-x/a})` for `x >= 0`, zero for `x < 0`.
//!
//! For `x >= 0` the outgoing solution is `J_ν(2qa e^{-x/2a})` with
//! `ν = -2ipa`, which behaves as `e^{ipx}` deep inside the step. Matching to
//! `e^{ikx} + r e^{-ikx}` at `x = 0` gives
//!
//! ```text
//! r = (ik J_ν(2qa) + q J'_ν(2qa)) / (ik J_ν(2qa) - q J'_ν(2qa))
//! ```
//!
//! with `k = √E`, `p = √(E - V1 - V2)`, `q = √V2` and `J'` the derivative
//! with respect to the Bessel argument. Below `V1 + V2` the branch
//! `p = i|p|` gives a real order, real `J`, and `|r| = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{bessel_j, principal_sqrt, uniform_grid, Curve, CurveError, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReflectError {
    #[error("InvalidStep: {0}")]
    InvalidStep(String),
    #[error("InvalidEnergy: {0}")]
    InvalidEnergy(f64),
    #[error("ThresholdBranchPoint: E = {0} is at V1 + V2")]
    ThresholdBranchPoint(f64),
    #[error("VanishingAmplitude: |r| = {amplitude} at E = {energy}")]
    VanishingAmplitude { energy: f64, amplitude: f64 },
    #[error("UnwrapFailed: phase still jumps by {jump} between {lo} and {hi}")]
    UnwrapFailed { lo: f64, hi: f64, jump: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpStep {
    pub v1: f64,
    pub v2: f64,
    pub a: f64,
}

impl ExpStep {
    pub fn new(v1: f64, v2: f64, a: f64) -> Result<Self, ReflectError> {
        if !v1.is_finite() {
            return Err(ReflectError::InvalidStep(format!("V1 must be finite, got {v1}")));
        }
        if !(v2 > 0.0 && v2.is_finite()) {
            return Err(ReflectError::InvalidStep(format!(
                "V2 must be positive, got {v2}"
            )));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(ReflectError::InvalidStep(format!("a must be positive, got {a}")));
        }
        Ok(Self { v1, v2, a })
    }

    pub fn threshold(&self) -> f64 {
        self.v1 + self.v2
    }

    pub fn potential(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.v1 + self.v2 * (1.0 - (-x / self.a).exp())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSample {
    pub energy: f64,
    pub r: Complex64,
    pub reflectivity: f64,
    /// Principal value of `arg r`.
    pub theta: f64,
}

const THRESHOLD_GUARD: f64 = 1e-9;

pub fn reflection_amplitude(step: &ExpStep, e: f64) -> Result<Complex64, ReflectError> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(ReflectError::InvalidEnergy(e));
    }
    if (e - step.threshold()).abs() < THRESHOLD_GUARD {
        return Err(ReflectError::ThresholdBranchPoint(e));
    }
    let k = e.sqrt();
    let q = step.v2.sqrt();
    let p = principal_sqrt(Complex64::new(e - step.threshold(), 0.0));
    let nu = Complex64::new(0.0, -2.0) * p * step.a;
    let (j, dj) = bessel_j(nu, Complex64::new(2.0 * q * step.a, 0.0))?;
    let ikj = Complex64::new(0.0, k) * j;
    Ok((ikj + q * dj) / (ikj - q * dj))
}

pub fn reflection_sample(step: &ExpStep, e: f64) -> Result<ReflectionSample, ReflectError> {
    let r = reflection_amplitude(step, e)?;
    Ok(ReflectionSample {
        energy: e,
        r,
        reflectivity: r.norm_sqr(),
        theta: r.arg(),
    })
}

/// `R(E) = |r|²` on `n` uniform points of `[lo, hi]`.
pub fn reflectivity_curve(step: &ExpStep, lo: f64, hi: f64, n: usize) -> Result<Curve, ReflectError> {
    Curve::try_from_fn("reflectivity", lo, hi, n, |e| {
        reflection_amplitude(step, e).map(|r| r.norm_sqr())
    })
}

// Largest accepted change of the unwrapped phase between adjacent samples;
// beyond it the interval is bisected.
const MAX_PHASE_JUMP: f64 = std::f64::consts::FRAC_PI_2;
const MAX_REFINE_DEPTH: u32 = 30;

/// Continuity-unwrapped `θ(E)` on `n` uniform points of `[lo, hi]`, with
/// extra points inserted wherever adjacent samples differ by more than π/2.
pub fn theta_curve(step: &ExpStep, lo: f64, hi: f64, n: usize) -> Result<Curve, ReflectError> {
    let grid = uniform_grid(lo, hi, n).ok_or(CurveError::BadGrid)?;
    let theta = |e: f64| reflection_amplitude(step, e).map(|r| r.arg());
    let mut energies = vec![grid[0]];
    let mut values = vec![theta(grid[0])?];
    for w in grid.windows(2) {
        refine(&theta, w[0], w[1], &mut energies, &mut values, 0)?;
    }
    Ok(Curve::new("theta", energies, values)?)
}

fn refine<F>(
    theta: &F,
    lo: f64,
    hi: f64,
    energies: &mut Vec<f64>,
    values: &mut Vec<f64>,
    depth: u32,
) -> Result<(), ReflectError>
where
    F: Fn(f64) -> Result<f64, ReflectError>,
{
    let prev = *values.last().expect("seeded with the first sample");
    let next = unwrap_near(theta(hi)?, prev);
    if (next - prev).abs() <= MAX_PHASE_JUMP {
        energies.push(hi);
        values.push(next);
        return Ok(());
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(ReflectError::UnwrapFailed {
            lo,
            hi,
            jump: next - prev,
        });
    }
    let mid = 0.5 * (lo + hi);
    refine(theta, lo, mid, energies, values, depth + 1)?;
    refine(theta, mid, hi, energies, values, depth + 1)
}

/// The representative of `theta + 2πm` closest to `reference`.
fn unwrap_near(theta: f64, reference: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    theta + tau * ((reference - theta) / tau).round()
}

/// `ħ dθ/dE = Im(r̄ dr/dE)/|r|²` for any differentiable amplitude, with a
/// central difference of half-width `h`.
pub fn phase_delay<F>(amplitude: F, e: f64, h: f64) -> Result<f64, ReflectError>
where
    F: Fn(f64) -> Result<Complex64, ReflectError>,
{
    let r = amplitude(e)?;
    let norm = r.norm();
    if norm < 1e-8 {
        return Err(ReflectError::VanishingAmplitude {
            energy: e,
            amplitude: norm,
        });
    }
    let dr = (amplitude(e + h)? - amplitude(e - h)?) / (2.0 * h);
    Ok((r.conj() * dr).im / r.norm_sqr())
}

pub fn reflection_time_delay(step: &ExpStep, e: f64) -> Result<f64, ReflectError> {
    if !(e > step.threshold() + 1e-6) {
        return Err(ReflectError::InvalidEnergy(e));
    }
    // keep the stencil on the open side of the threshold
    let h = (1e-6 * e.max(1.0)).min(0.5 * (e - step.threshold()));
    phase_delay(|x| reflection_amplitude(step, x), e, h)
}
