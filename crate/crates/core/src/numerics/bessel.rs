use num_complex::Complex64;

use super::{complex_gamma, NumericsError};

const MAX_TERMS: usize = 200;
const MAX_ARG: f64 = 50.0;
const REL_CUTOFF: f64 = 1e-16;

/// Bessel function of the first kind `J_nu(z)` for complex order and
/// argument, together with `dJ_nu/dz`.
///
/// Ascending series
/// `J_nu(z) = Σ_k (-1)^k (z/2)^(nu+2k) / (k! Γ(nu+k+1))`,
/// with the derivative taken term by term (`d/dz` of each term is
/// `term · (nu+2k)/z`). Terms are generated by their ratio so `Γ` is
/// evaluated once. Only the small-argument regime `|z| <= 50` is supported.
pub fn bessel_j(nu: Complex64, z: Complex64) -> Result<(Complex64, Complex64), NumericsError> {
    if z.norm() > MAX_ARG {
        return Err(NumericsError::ArgumentOutOfRange(z.norm()));
    }
    if z == Complex64::new(0.0, 0.0) {
        return at_origin(nu);
    }

    // 1/Γ(nu+k+1) vanishes while nu+k+1 is a non-positive integer; the series
    // then starts at the first k past the pole (integer negative order).
    let first = first_live_term(nu);
    let half = z * 0.5;
    let log_half = half.ln();
    let k0 = first as f64;
    let mut factorial = 1.0;
    for i in 1..=first {
        factorial *= i as f64;
    }
    let sign = if first % 2 == 0 { 1.0 } else { -1.0 };
    let gamma = complex_gamma(nu + k0 + 1.0)?;
    let mut term = sign * ((nu + 2.0 * k0) * log_half).exp() / (gamma * factorial);

    let neg_q = -(half * half);
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut k = first;
    loop {
        let kf = k as f64;
        let dterm = term * (nu + 2.0 * kf) / z;
        value += term;
        deriv += dterm;
        let small_value = term.norm() <= REL_CUTOFF * value.norm();
        let small_deriv = dterm.norm() <= REL_CUTOFF * deriv.norm();
        // Terms only decay once k exceeds |z|/2; don't stop on the rising edge.
        if (small_value && small_deriv && kf > half.norm()) || term.norm() == 0.0 {
            return Ok((value, deriv));
        }
        k += 1;
        if k - first >= MAX_TERMS {
            return Err(NumericsError::SeriesNonConvergence {
                nu,
                z,
                terms: MAX_TERMS,
            });
        }
        let kf = k as f64;
        term *= neg_q / (kf * (nu + kf));
    }
}

fn first_live_term(nu: Complex64) -> usize {
    if nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round() {
        (-nu.re) as usize
    } else {
        0
    }
}

fn at_origin(nu: Complex64) -> Result<(Complex64, Complex64), NumericsError> {
    let zero = Complex64::new(0.0, 0.0);
    if nu == zero {
        return Ok((Complex64::new(1.0, 0.0), zero));
    }
    if nu == Complex64::new(1.0, 0.0) {
        return Ok((zero, Complex64::new(0.5, 0.0)));
    }
    if nu.re > 1.0 {
        return Ok((zero, zero));
    }
    if nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round() {
        // J_{-n} = (-1)^n J_n
        let n = -nu.re;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let (v, d) = at_origin(Complex64::new(n, 0.0))?;
        return Ok((v * sign, d * sign));
    }
    Err(NumericsError::BranchAmbiguity(nu))
}
