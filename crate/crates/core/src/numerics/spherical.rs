use num_complex::Complex64;

use super::NumericsError;

pub const MAX_ORDER: u32 = 30;

/// Spherical Bessel `j_l`, Neumann `n_l` (the `y_l` of A&S) and outgoing
/// Hankel `h_l^(1) = j_l + i n_l` at one argument, with z-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalBessel {
    pub j: Complex64,
    pub dj: Complex64,
    pub n: Complex64,
    pub dn: Complex64,
    pub h1: Complex64,
    pub dh1: Complex64,
}

/// Evaluates [`SphericalBessel`] of order `l` at complex `z`.
///
/// `n_l` comes from upward recurrence, which is stable for it everywhere.
/// `j_l` is recurred upward when `|z| >= l`; below that the upward direction
/// loses digits, so a Miller downward sweep is normalised against `j_0` (or
/// `j_1` near a zero of `sin z`).
pub fn sph_bessel(l: u32, z: Complex64) -> Result<SphericalBessel, NumericsError> {
    if z.norm() < 1e-300 {
        return Err(NumericsError::ZeroArgument);
    }
    if l > MAX_ORDER {
        return Err(NumericsError::OrderOutOfRange(l));
    }
    let l = l as usize;
    let (sin, cos) = (z.sin(), z.cos());
    let j0 = sin / z;
    let j1 = sin / (z * z) - cos / z;
    let n0 = -cos / z;
    let n1 = -cos / (z * z) - sin / z;

    let ns = upward(l + 1, z, n0, n1);
    let js = if z.norm() >= l as f64 {
        upward(l + 1, z, j0, j1)
    } else {
        downward(l + 1, z, j0, j1)
    };

    let deriv = |f: &[Complex64]| -> Complex64 {
        // f_l' = f_{l-1} - (l+1)/z f_l, and f_0' = -f_1
        if l == 0 {
            -f[1]
        } else {
            f[l - 1] - f[l] * ((l + 1) as f64) / z
        }
    };
    let j = js[l];
    let n = ns[l];
    let dj = deriv(&js);
    let dn = deriv(&ns);
    let i = Complex64::new(0.0, 1.0);
    Ok(SphericalBessel {
        j,
        dj,
        n,
        dn,
        h1: j + i * n,
        dh1: dj + i * dn,
    })
}

/// Riccati forms `ĵ_l(z) = z j_l(z)` and `n̂_l(z) = z n_l(z)` with their
/// derivatives, as `(ĵ, ĵ', n̂, n̂')`. Their Wronskian `ĵ n̂' - ĵ' n̂` is 1.
pub fn riccati(l: u32, z: Complex64) -> Result<(Complex64, Complex64, Complex64, Complex64), NumericsError> {
    let s = sph_bessel(l, z)?;
    Ok((s.j * z, s.j + z * s.dj, s.n * z, s.n + z * s.dn))
}

fn upward(top: usize, z: Complex64, f0: Complex64, f1: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(top + 1);
    out.push(f0);
    out.push(f1);
    for k in 1..top {
        let next = out[k] * ((2 * k + 1) as f64) / z - out[k - 1];
        out.push(next);
    }
    out.truncate(top + 1);
    out
}

fn downward(top: usize, z: Complex64, j0: Complex64, j1: Complex64) -> Vec<Complex64> {
    // Start well above both the requested order and |z|.
    let start = top + 20 + z.norm().ceil() as usize + (top as f64).sqrt() as usize * 4;
    let mut vals = vec![Complex64::new(0.0, 0.0); start + 2];
    vals[start] = Complex64::new(1e-30, 0.0);
    for k in (1..=start).rev() {
        vals[k - 1] = vals[k] * ((2 * k + 1) as f64) / z - vals[k + 1];
        // Rescale to stay in range on long sweeps.
        if vals[k - 1].norm() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let scale = if j0.norm() >= j1.norm() {
        j0 / vals[0]
    } else {
        j1 / vals[1]
    };
    vals.truncate(top + 1);
    vals.into_iter().map(|v| v * scale).collect()
}
