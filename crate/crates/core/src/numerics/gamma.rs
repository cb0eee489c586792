use std::f64::consts::PI;

use num_complex::Complex64;

use super::NumericsError;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const POLE_EPS: f64 = 1e-12;

/// Gamma function of a complex argument.
///
/// Lanczos series on `re(z) >= 0.5`, reflection formula
/// `Γ(z) Γ(1-z) = π / sin(πz)` below that.
pub fn complex_gamma(z: Complex64) -> Result<Complex64, NumericsError> {
    if z.im.abs() < POLE_EPS && z.re < POLE_EPS {
        let nearest = z.re.round();
        if (z.re - nearest).abs() < POLE_EPS {
            return Err(NumericsError::PoleOfGamma(z));
        }
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return PI / (s * gamma_unchecked(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}
