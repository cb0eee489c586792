use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Recursion limit of the adaptive bisection.
pub const MAX_DEPTH: u32 = 40;

// Uniform panels laid down before adaptation starts, so narrow features are
// not skipped by a coarse first Simpson estimate.
const INITIAL_PANELS: usize = 16;

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel Richardson error estimates.
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. `a > b` integrates the reversed interval and negates.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let q = integrate(f, b, a, tol)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }

    let mut state = State {
        f: &f,
        evaluations: 0,
    };
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut lo = a;
    let mut f_lo = state.eval(lo)?;
    for i in 0..INITIAL_PANELS {
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + width * (i + 1) as f64
        };
        let mid = 0.5 * (lo + hi);
        let f_mid = state.eval(mid)?;
        let f_hi = state.eval(hi)?;
        let whole = simpson(lo, hi, f_lo, f_mid, f_hi);
        let (v, e) = state.adapt(lo, hi, f_lo, f_mid, f_hi, whole, panel_tol, 0)?;
        value += v;
        error += e;
        lo = hi;
        f_lo = f_hi;
    }
    Ok(Quadrature {
        value,
        error,
        evaluations: state.evaluations,
    })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct State<'a, F> {
    f: &'a F,
    evaluations: usize,
}

impl<F: Fn(f64) -> f64> State<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64, NumericsError> {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite { x, value: v })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn adapt(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<(f64, f64), NumericsError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        // |Δ| <= tol rather than the textbook 15·tol: the Richardson estimate
        // is optimistic on smooth-looking panels of peaked integrands.
        // Tolerance floor at a few ulps of the panel value: halving `tol`
        // forty times would otherwise ask for more than f64 can give.
        let floor = 64.0 * f64::EPSILON * (left + right).abs();
        if delta.abs() <= tol.max(floor) {
            return Ok((left + right + delta / 15.0, delta.abs() / 15.0));
        }
        if depth >= MAX_DEPTH {
            return Err(NumericsError::MaxDepthExceeded { a, b });
        }
        let (lv, le) = self.adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let (rv, re) = self.adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok((lv + rv, le + re))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn polynomial() {
        let q = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-10);
        assert!(q.evaluations > 0);
    }

    #[test]
    fn sine_half_period() {
        let q = integrate(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn lorentzian_window_matches_arctan() {
        // ∫ over E0 ± 50Γ of (Γ/2)/((E-E0)^2 + Γ^2/4) = 2 atan(100) = π - 2 atan(1/100)
        let (e0, g) = (5.0, 0.2);
        let f = |e: f64| (g / 2.0) / ((e - e0).powi(2) + g * g / 4.0);
        let q = integrate(f, e0 - 50.0 * g, e0 + 50.0 * g, 1e-10).unwrap();
        assert!((q.value - 2.0 * 100f64.atan()).abs() < 1e-6);
        assert!((q.value - (PI - 2.0 * 0.01f64.atan())).abs() < 1e-6);
    }

    #[test]
    fn reversal_negates() {
        let f = |x: f64| (3.0 * x).cos() + x;
        let ab = integrate(f, -1.0, 2.0, 1e-12).unwrap().value;
        let ba = integrate(f, 2.0, -1.0, 1e-12).unwrap().value;
        assert_eq!(ab, -ba);
    }

    #[test]
    fn integrable_threshold_singularity() {
        // ∫_{1e-6}^{1} x^{-1/2} dx = 2(1 - 1e-3)
        let q = integrate(|x| 1.0 / x.sqrt(), 1e-6, 1.0, 1e-9).unwrap();
        assert!((q.value - 2.0 * (1.0 - 1e-3)).abs() < 1e-8);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let err = integrate(|x| 1.0 / x, -1.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, NumericsError::NonFinite { .. }));
    }
}
