//! Numerical substrate: special functions of complex argument, complex Newton
//! iteration, adaptive quadrature and extremum detection on sampled curves.
//!
//! Everything here is pure and deterministic. Complex quantities use
//! [`num_complex::Complex64`]; square roots and logarithms are principal
//! branch unless a call site says otherwise.

mod bessel;
mod curve;
mod extrema;
mod gamma;
mod quad;
mod roots;
mod spherical;

pub use bessel::bessel_j;
pub use curve::{uniform_grid, Curve, CurveError};
pub use extrema::{find_extrema, ExtremumKind, Peak, PeakList};
pub use gamma::complex_gamma;
pub use quad::{integrate, Quadrature, MAX_DEPTH};
pub use roots::newton_complex;
pub use spherical::{riccati, sph_bessel, SphericalBessel};

pub use num_complex::Complex64;

use thiserror::Error;

/// Failures of the numerical primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("PoleOfGamma: argument {0} is a non-positive integer")]
    PoleOfGamma(Complex64),
    #[error("BranchAmbiguity: z = 0 with order {0} makes z^nu undefined")]
    BranchAmbiguity(Complex64),
    #[error("SeriesNonConvergence: Bessel series for nu = {nu}, z = {z} exceeded {terms} terms")]
    SeriesNonConvergence {
        nu: Complex64,
        z: Complex64,
        terms: usize,
    },
    #[error("ArgumentOutOfRange: |z| = {0} exceeds the series regime")]
    ArgumentOutOfRange(f64),
    #[error("ZeroArgument: spherical Bessel functions need z != 0")]
    ZeroArgument,
    #[error("OrderOutOfRange: l = {0} exceeds the supported maximum")]
    OrderOutOfRange(u32),
    #[error("NoConvergence: Newton stopped at {last} with residual {residual:e}")]
    NoConvergence { last: Complex64, residual: f64 },
    #[error("MaxDepthExceeded: adaptive quadrature could not resolve [{a}, {b}]")]
    MaxDepthExceeded { a: f64, b: f64 },
    #[error("NonFinite: integrand returned {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
}

/// Principal square root with the cut on the negative real axis and
/// `sqrt(-x) = +i sqrt(x)` for `x > 0`.
///
/// `Complex64::sqrt` already has this behaviour except for a signed zero in
/// the imaginary part, which flips the result to `-i sqrt(x)`; that sign is
/// normalised here so negative reals always land on the upper side.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    z.sqrt()
}
