//! Breit–Wigner reconstruction of the time delay from resonance poles and the
//! resonance-counting integral `n_R = (1/π) ∫ T dE`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{integrate, Curve, NumericsError};
use crate::poles::{Classification, Pole};
use crate::scattering::E_MIN;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountingError {
    #[error("SpuriousIncluded: pole at {0} is classified spurious")]
    SpuriousIncluded(f64),
    #[error("InvalidRange: need 0 <= lo < hi, got [{0}, {1}]")]
    InvalidRange(f64, f64),
    #[error("InvalidHeight: peak height must be positive, got {0}")]
    InvalidHeight(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `ħ(Γ/2) / ((E - E₀)² + Γ²/4)`, ħ = 1.
pub fn breit_wigner(e: f64, e0: f64, gamma: f64) -> f64 {
    0.5 * gamma / ((e - e0).powi(2) + 0.25 * gamma * gamma)
}

/// Sum of Breit–Wigner terms of resonance poles. Spurious poles are refused.
pub fn lorentzian_sum(poles: &[Pole], e: f64) -> Result<f64, CountingError> {
    if let Some(p) = poles
        .iter()
        .find(|p| p.classification == Classification::Spurious)
    {
        return Err(CountingError::SpuriousIncluded(p.position()));
    }
    Ok(breit_wigner_sum(poles, e))
}

/// Breit–Wigner sum over every pole passed, whatever its classification.
pub fn breit_wigner_sum(poles: &[Pole], e: f64) -> f64 {
    poles
        .iter()
        .map(|p| breit_wigner(e, p.position(), p.width()))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub n_r: f64,
    /// Integer part of `n_r`.
    pub n: i64,
    /// Fractional part of `n_r`.
    pub delta: f64,
    /// `n_r` lies within the quadrature tolerance of an integer, so the
    /// split into `n` and `delta` is not meaningful at that resolution.
    pub near_integer: bool,
    pub e_range: (f64, f64),
    pub quadrature_tol: f64,
    pub evaluations: usize,
}

impl CountReport {
    /// Report for an `n_R` obtained elsewhere, e.g. by trapezoidal
    /// integration of tabulated data.
    pub fn from_value(n_r: f64, e_range: (f64, f64), tol: f64, evaluations: usize) -> Self {
        let n = n_r.floor();
        let delta = n_r - n;
        let slack = tol / std::f64::consts::PI;
        Self {
            n_r,
            n: n as i64,
            delta,
            near_integer: delta < slack || 1.0 - delta < slack,
            e_range,
            quadrature_tol: tol,
            evaluations,
        }
    }
}

/// `n_R = (1/π) ∫_lo^hi T(E) dE`. A lower limit of zero is moved to `E_MIN`
/// to avoid the threshold.
pub fn count_resonances<F>(delay: F, lo: f64, hi: f64, tol: f64) -> Result<CountReport, CountingError>
where
    F: Fn(f64) -> f64,
{
    if !(lo >= 0.0 && hi > lo) {
        return Err(CountingError::InvalidRange(lo, hi));
    }
    let lo = if lo == 0.0 { E_MIN } else { lo };
    let q = integrate(delay, lo, hi, tol)?;
    let n_r = q.value / std::f64::consts::PI;
    let n = n_r.floor();
    let delta = n_r - n;
    let slack = (q.error.abs() + tol) / std::f64::consts::PI;
    Ok(CountReport {
        n_r,
        n: n as i64,
        delta,
        near_integer: delta < slack || 1.0 - delta < slack,
        e_range: (lo, hi),
        quadrature_tol: tol,
        evaluations: q.evaluations,
    })
}

/// `Γ = 2ħ / T_max`.
pub fn gamma_from_peak(peak_height: f64) -> Result<f64, CountingError> {
    if !(peak_height > 0.0) || !peak_height.is_finite() {
        return Err(CountingError::InvalidHeight(peak_height));
    }
    Ok(2.0 / peak_height)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub max_rel_error: f64,
    pub l2_rel_error: f64,
    pub e_range: (f64, f64),
    pub poles_used: usize,
    /// Samples above the tail cutoff that entered the error metrics.
    pub samples_used: usize,
}

/// Fraction of the curve maximum below which samples are ignored.
pub const TAIL_CUTOFF: f64 = 0.01;

/// Compares the Lorentzian sum of `poles` against `exact` on its own grid.
///
/// Every pole passed is summed regardless of classification, so the effect of
/// adding a spurious root can be measured.
pub fn reconstruction_report(exact: &Curve, poles: &[Pole]) -> ReconstructionReport {
    let floor = TAIL_CUTOFF * exact.max_value();
    let mut max_rel: f64 = 0.0;
    let (mut num, mut den) = (0.0, 0.0);
    let mut used = 0;
    for (&e, &t) in exact.energies().iter().zip(exact.values()) {
        if t <= floor {
            continue;
        }
        let diff = breit_wigner_sum(poles, e) - t;
        max_rel = max_rel.max(diff.abs() / t.abs());
        num += diff * diff;
        den += t * t;
        used += 1;
    }
    ReconstructionReport {
        max_rel_error: max_rel,
        l2_rel_error: if den > 0.0 { (num / den).sqrt() } else { 0.0 },
        e_range: exact.range().unwrap_or((f64::NAN, f64::NAN)),
        poles_used: poles.len(),
        samples_used: used,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::numerics::{find_extrema, ExtremumKind};

    #[test]
    fn peak_and_half_width() {
        let p = [Pole::resonance(5.0, 0.2)];
        assert!((lorentzian_sum(&p, 5.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((lorentzian_sum(&p, 5.1).unwrap() - 5.0).abs() < 1e-12);
        assert!((lorentzian_sum(&p, 4.9).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn spurious_pole_is_refused() {
        let mut bad = Pole::new(Complex64::new(0.3, -0.6), 0.0);
        bad.classification = Classification::Spurious;
        let err = lorentzian_sum(&[Pole::resonance(1.0, 0.1), bad], 1.0).unwrap_err();
        assert_eq!(err, CountingError::SpuriousIncluded(0.3));
    }

    #[test]
    fn ideal_lorentzian_counts_one() {
        let r = count_resonances(|e| breit_wigner(e, 50.0, 1.0), 0.0, 1e4, 1e-9).unwrap();
        // arctan antiderivative: (atan(2·9950) + atan(100))/π
        let exact = ((2.0f64 * 9950.0).atan() + (100.0f64).atan()) / PI;
        assert!((r.n_r - exact).abs() < 1e-8, "{}", r.n_r);
        // the lower tail beyond E = 0 alone costs Γ/(π·50) ≈ 3.2e-3
        assert!((r.n_r - 1.0).abs() < 3.3e-3);
        assert_eq!(r.e_range.0, E_MIN);
    }

    #[test]
    fn zero_function_counts_zero() {
        let r = count_resonances(|_| 0.0, 2.0, 7.0, 1e-10).unwrap();
        assert_eq!(r.n_r, 0.0);
        assert_eq!(r.n, 0);
        assert!(r.near_integer);
    }

    #[test]
    fn bad_range_is_rejected() {
        assert!(count_resonances(|_| 1.0, 3.0, 1.0, 1e-8).is_err());
        assert!(count_resonances(|_| 1.0, -1.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn gamma_from_height() {
        assert!((gamma_from_peak(10.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((gamma_from_peak(2.0 / 0.129).unwrap() - 0.129).abs() < 1e-15);
        assert!(gamma_from_peak(0.0).is_err());
    }

    #[test]
    fn round_trip_reconstruction() {
        let poles = [Pole::resonance(2.0, 0.3), Pole::resonance(6.0, 1.1)];
        let exact = Curve::from_fn("rt", 0.5, 10.0, 500, |e| breit_wigner_sum(&poles, e)).unwrap();
        let r = reconstruction_report(&exact, &poles);
        assert!(r.max_rel_error < 1e-12 && r.l2_rel_error < 1e-12);
        assert_eq!(r.poles_used, 2);
    }

    proptest! {
        #[test]
        fn additivity(b in 1.0f64..9.0, e0 in 0.5f64..9.5, g in 0.05f64..2.0) {
            let tol = 1e-10;
            let f = |e: f64| breit_wigner(e, e0, g) + 0.1 * e.sin().powi(2);
            let ab = count_resonances(f, 0.1, b, tol).unwrap().n_r;
            let bc = count_resonances(f, b, 10.0, tol).unwrap().n_r;
            let ac = count_resonances(f, 0.1, 10.0, tol).unwrap().n_r;
            prop_assert!((ab + bc - ac).abs() <= 2.0 * tol, "{}", ab + bc - ac);
        }

        #[test]
        fn narrow_resonances_each_count_one(n in 1usize..6, g in 0.001f64..0.05) {
            // comb of well separated lines at 10, 20, ..., n·10 inside (5, 10n + 5)
            let poles: Vec<_> = (1..=n).map(|j| Pole::resonance(10.0 * j as f64, g)).collect();
            let (lo, hi) = (5.0, 10.0 * n as f64 + 5.0);
            let r = count_resonances(|e| breit_wigner_sum(&poles, e), lo, hi, 1e-10).unwrap();
            // each line loses about Γ/(π d) to both truncation edges and to its neighbours
            let leak: f64 = poles.iter().map(|p| {
                g / PI * (1.0 / (p.position() - lo) + 1.0 / (hi - p.position()))
            }).sum();
            prop_assert!((r.n_r - n as f64).abs() <= leak + 1e-8, "{} vs {n}", r.n_r);
            prop_assert_eq!(r.n, n as i64 - 1);
        }

        #[test]
        fn single_line_is_symmetric_and_positive(e0 in 1.0f64..10.0, g in 0.01f64..3.0, d in 0.0f64..5.0) {
            let p = [Pole::resonance(e0, g)];
            let up = lorentzian_sum(&p, e0 + d).unwrap();
            let down = lorentzian_sum(&p, e0 - d).unwrap();
            prop_assert!(up > 0.0);
            prop_assert!((up - down).abs() <= 1e-12 * up.max(1.0));
        }

        #[test]
        fn width_from_detected_peak(e0 in 2.0f64..8.0, g in 0.1f64..1.0) {
            let curve = Curve::from_fn("bw", 0.0, 10.0, 2001, |e| breit_wigner(e, e0, g)).unwrap();
            let peak = find_extrema(&curve).into_iter().find(|p| p.kind == ExtremumKind::Max).unwrap();
            let gamma = gamma_from_peak(peak.height).unwrap();
            prop_assert!((gamma - g).abs() / g < 0.01, "{gamma} vs {g}");
        }
    }
}
