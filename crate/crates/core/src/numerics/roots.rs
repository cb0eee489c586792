use num_complex::Complex64;

use super::NumericsError;

/// Newton iteration for an analytic `f` in the complex plane.
///
/// The derivative is a central complex difference with step
/// `1e-7 * max(1, |z|)` along the real axis, which equals `f'` for analytic
/// `f`. Returns the first iterate whose residual satisfies `|f(z)| <= tol`.
pub fn newton_complex<F>(f: F, seed: Complex64, tol: f64, max_iter: usize) -> Result<Complex64, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut z = seed;
    let mut fz = f(z);
    for _ in 0..max_iter {
        if !fz.is_finite() {
            break;
        }
        if fz.norm() <= tol {
            return Ok(z);
        }
        let h = 1e-7 * z.norm().max(1.0);
        let df = (f(z + h) - f(z - h)) / (2.0 * h);
        if df.norm() == 0.0 || !df.is_finite() {
            break;
        }
        z -= fz / df;
        fz = f(z);
    }
    if fz.is_finite() && fz.norm() <= tol {
        return Ok(z);
    }
    Err(NumericsError::NoConvergence {
        last: z,
        residual: fz.norm(),
    })
}
