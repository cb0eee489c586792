//! Solvable partial-wave models, their hard-sphere-subtracted phase shifts,
//! S-matrices and time delays, in units `2m = ħ = 1`.
//!
//! Wavenumbers are `k = √E` outside and `p = √(E + V0)` inside the square
//! well, both principal branch; for real `E > 0` above the well bottom this is
//! the positive root, and a complex `E` in the lower half plane lands on the
//! sheet where resonance poles `E_j - iΓ_j/2` live.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{principal_sqrt, sph_bessel, NumericsError};

pub const MAX_L: u32 = 30;

/// Lowest energy any sweep starts from; `k = 0` is a branch point.
pub const E_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatteringError {
    #[error("InvalidModel: {0}")]
    InvalidModel(String),
    #[error("InvalidEnergy: {0} (needs E > 0)")]
    InvalidEnergy(f64),
    #[error("InteriorNode: j_l(pa) vanishes at E = {0}")]
    InteriorNode(Complex64),
    #[error("NonRealDelay: imaginary residue {residue:e} at E = {energy}")]
    NonRealDelay { energy: f64, residue: f64 },
    #[error("analytic form needs l = 0, got l = {0}")]
    NotSWave(u32),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Spherical square well, `V(r < a) = -depth`, zero outside.
///
/// Positive depth is attractive; a negative depth is a repulsive barrier of
/// height `|depth|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareWell {
    pub depth: f64,
    pub radius: f64,
    pub l: u32,
}

impl SquareWell {
    pub fn new(depth: f64, radius: f64, l: u32) -> Result<Self, ScatteringError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ScatteringError::InvalidModel(format!(
                "square well radius must be positive, got {radius}"
            )));
        }
        if !depth.is_finite() {
            return Err(ScatteringError::InvalidModel(
                "square well depth must be finite".into(),
            ));
        }
        if l > MAX_L {
            return Err(ScatteringError::InvalidModel(format!("l = {l} exceeds {MAX_L}")));
        }
        Ok(Self { depth, radius, l })
    }

    pub fn interior_wavenumber(&self, e: Complex64) -> Complex64 {
        principal_sqrt(e + self.depth)
    }
}

/// Repulsive s-wave shell `V0 δ(r - a)`.
///
/// The derivative of the radial function jumps by `a·V0·u(a)` across the
/// shell; [`DeltaShell::coupling`] is that combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaShell {
    pub strength: f64,
    pub radius: f64,
}

impl DeltaShell {
    pub fn new(strength: f64, radius: f64) -> Result<Self, ScatteringError> {
        if !(strength > 0.0) || !strength.is_finite() {
            return Err(ScatteringError::InvalidModel(format!(
                "delta shell strength must be positive, got {strength}"
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ScatteringError::InvalidModel(format!(
                "delta shell radius must be positive, got {radius}"
            )));
        }
        Ok(Self { strength, radius })
    }

    pub fn coupling(&self) -> f64 {
        self.radius * self.strength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    SquareWell(SquareWell),
    DeltaShell(DeltaShell),
}

impl From<SquareWell> for Model {
    fn from(m: SquareWell) -> Self {
        Model::SquareWell(m)
    }
}

impl From<DeltaShell> for Model {
    fn from(m: DeltaShell) -> Self {
        Model::DeltaShell(m)
    }
}

impl Model {
    pub fn radius(&self) -> f64 {
        match self {
            Model::SquareWell(m) => m.radius,
            Model::DeltaShell(m) => m.radius,
        }
    }

    pub fn angular_momentum(&self) -> u32 {
        match self {
            Model::SquareWell(m) => m.l,
            Model::DeltaShell(_) => 0,
        }
    }

    /// The model's S-matrix element at complex energy.
    ///
    /// For the s-wave square well this is `(ik tan pa + p)/(ik tan pa - p)`
    /// as written, which equals `-e^{2iδ̄}`; every other case returns the
    /// hard-sphere-subtracted `e^{2iδ̄}` directly (see
    /// [`Model::subtracted_s_matrix`]).
    pub fn s_matrix(&self, e: Complex64) -> Result<Complex64, ScatteringError> {
        check_nonzero(e)?;
        match self {
            Model::SquareWell(w) if w.l == 0 => {
                let k = principal_sqrt(e);
                let p = w.interior_wavenumber(e);
                let pa = p * w.radius;
                // tan pa cleared through cos pa; identical away from cos pa = 0
                // and finite there.
                let ik_sin = Complex64::i() * k * pa.sin();
                let p_cos = p * pa.cos();
                Ok((ik_sin + p_cos) / (ik_sin - p_cos))
            }
            _ => self.subtracted_s_matrix(e),
        }
    }

    /// `S̄ = e^{2i(δ_l - δ_l^H)}` with `δ^H` the hard-sphere phase of radius `a`.
    pub fn subtracted_s_matrix(&self, e: Complex64) -> Result<Complex64, ScatteringError> {
        check_nonzero(e)?;
        let i = Complex64::i();
        match self {
            Model::SquareWell(w) => {
                let k = principal_sqrt(e);
                let p = w.interior_wavenumber(e);
                let (ka, pa) = (k * w.radius, p * w.radius);
                let outer = sph_bessel(w.l, ka)?;
                let inner = sph_bessel(w.l, pa)?;
                // tan δ = [k j'(ka) - γ j(ka)] / [k n'(ka) - γ n(ka)] with
                // γ = p j'(pa)/j(pa); multiplied through by j(pa).
                let num = k * outer.dj * inner.j - p * inner.dj * outer.j;
                let den = k * outer.dn * inner.j - p * inner.dj * outer.n;
                let full = (den + i * num) / (den - i * num);
                // e^{-2iδ^H} with tan δ^H = j(ka)/n(ka)
                let hard = (outer.n - i * outer.j) / (outer.n + i * outer.j);
                Ok(full * hard)
            }
            Model::DeltaShell(d) => {
                let k = principal_sqrt(e);
                let ka = k * d.radius;
                // tan δ̄ = k tan ka / (k + g tan ka), cleared through cos ka
                let num = k * ka.sin();
                let den = k * ka.cos() + d.coupling() * ka.sin();
                Ok((den + i * num) / (den - i * num))
            }
        }
    }
}

fn check_nonzero(e: Complex64) -> Result<(), ScatteringError> {
    if e.norm() == 0.0 || !e.is_finite() {
        return Err(ScatteringError::InvalidEnergy(e.re));
    }
    Ok(())
}

fn check_positive(e: f64) -> Result<(), ScatteringError> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(ScatteringError::InvalidEnergy(e));
    }
    Ok(())
}

/// Hard-sphere-subtracted phase shift: principal value in `(-π/2, π/2]`
/// plus the number of `π` branches accumulated by continuity tracking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftValue {
    pub delta_bar: f64,
    pub branch: i64,
}

impl PhaseShiftValue {
    pub fn value(&self) -> f64 {
        self.delta_bar + self.branch as f64 * std::f64::consts::PI
    }
}

/// `δ̄(E) = arg(S̄)/2`, principal branch.
pub fn phase_shift_bar(model: &Model, e: f64) -> Result<PhaseShiftValue, ScatteringError> {
    check_positive(e)?;
    let s = model.subtracted_s_matrix(Complex64::new(e, 0.0))?;
    let mut half = 0.5 * s.arg();
    // arg ∈ (-π, π] maps to (-π/2, π/2]; fold the lower endpoint up.
    if half <= -std::f64::consts::FRAC_PI_2 {
        half += std::f64::consts::PI;
    }
    Ok(PhaseShiftValue {
        delta_bar: half,
        branch: 0,
    })
}

/// Phase shifts along an increasing energy sweep with branch crossings
/// accumulated so that adjacent values differ by less than `π/2`.
pub fn tracked_phase_shifts(
    model: &Model,
    energies: &[f64],
) -> Result<Vec<PhaseShiftValue>, ScatteringError> {
    let mut out: Vec<PhaseShiftValue> = Vec::with_capacity(energies.len());
    for &e in energies {
        let mut v = phase_shift_bar(model, e)?;
        if let Some(prev) = out.last() {
            let jump = v.value() - prev.value();
            v.branch = prev.branch - (jump / std::f64::consts::PI).round() as i64;
        }
        out.push(v);
    }
    Ok(out)
}

/// Energy step used by [`time_delay`] callers by default.
pub fn default_step(e: f64) -> f64 {
    1e-6 * e.abs().max(1.0)
}

/// Time delay `T = ħ dδ̄/dE`, evaluated as `-(iħ/2) S̄* dS̄/dE`.
///
/// The derivative is a central difference in `k = √E` with half-width
/// `step/(2k)`, capped at `1e-3·k`, and `dE = 2k dk`. Near threshold the
/// phase is smooth in `k` but not in `E`, and an energy stencil would
/// straddle `E = 0`.
pub fn time_delay(model: &Model, e: f64, step: f64) -> Result<f64, ScatteringError> {
    check_positive(e)?;
    if !(step > 0.0) {
        return Err(ScatteringError::InvalidEnergy(e - step));
    }
    let k = e.sqrt();
    let hk = (0.5 * step / k).min(1e-3 * k);
    let at = |kk: f64| model.subtracted_s_matrix(Complex64::new(kk * kk, 0.0));
    let s = model.subtracted_s_matrix(Complex64::new(e, 0.0))?;
    let ds = (at(k + hk)? - at(k - hk)?) / (2.0 * hk * 2.0 * k);
    let t = -0.5 * Complex64::i() * s.conj() * ds;
    if t.im.abs() > 1e-6 * t.re.abs().max(1.0) {
        return Err(ScatteringError::NonRealDelay {
            energy: e,
            residue: t.im,
        });
    }
    Ok(t.re)
}

/// Closed-form s-wave square-well delay
/// `[V0 tan pa + a p k² sec² pa] / [2pk(p² + k² tan² pa)]`.
///
/// Evaluated with numerator and denominator multiplied by `cos² pa`, which
/// removes the apparent singularity at `cos pa = 0`. Below the well bottom of
/// a barrier `p` is imaginary and the expression stays real.
pub fn time_delay_square_well_analytic(well: &SquareWell, e: f64) -> Result<f64, ScatteringError> {
    check_positive(e)?;
    if well.l != 0 {
        return Err(ScatteringError::NotSWave(well.l));
    }
    let a = well.radius;
    let k = e.sqrt();
    let p = principal_sqrt(Complex64::new(e + well.depth, 0.0));
    let (s, c) = ((p * a).sin(), (p * a).cos());
    let num = well.depth * s * c + a * p * k * k;
    let den = 2.0 * p * k * (p * p * c * c + k * k * s * s);
    Ok((num / den).re)
}

/// Closed-form delta-shell delay
/// `[g tan² ka + a k² sec² ka] / (2k [k² tan² ka + (k + g tan ka)²])`,
/// `g = a·V0`, multiplied through by `cos² ka`.
pub fn time_delay_delta_shell_analytic(shell: &DeltaShell, e: f64) -> Result<f64, ScatteringError> {
    check_positive(e)?;
    let a = shell.radius;
    let g = shell.coupling();
    let k = e.sqrt();
    let (s, c) = ((k * a).sin(), (k * a).cos());
    let num = g * s * s + a * k * k;
    let den = 2.0 * k * (k * k * s * s + (k * c + g * s).powi(2));
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_square_well_s_matrix() {
        let m: Model = SquareWell::new(0.0, 10.0, 0).unwrap().into();
        let s = m.s_matrix(c(1.0)).unwrap();
        let expected = -(Complex64::i() * 20.0).exp();
        assert!((s - expected).norm() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unitarity_on_real_axis() {
        let m: Model = SquareWell::new(5.0, 10.0, 0).unwrap().into();
        for i in 1..=100 {
            let s = m.s_matrix(c(i as f64 * 0.1)).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn l0_matching_agrees_with_closed_form() {
        // Spherical-function route at l = 0 reproduces -Eq.(6)
        let w = SquareWell::new(5.0, 10.0, 0).unwrap();
        let m = Model::SquareWell(w);
        for e in [0.3, 1.7, 6.25] {
            let closed = m.s_matrix(c(e)).unwrap();
            let matched = m.subtracted_s_matrix(c(e)).unwrap();
            assert!((closed + matched).norm() < 1e-10, "{closed} vs {matched}");
        }
    }

    #[test]
    fn hard_sphere_phase_is_minus_ka() {
        for e in [0.2f64, 1.0, 3.3, 9.0] {
            let ka = e.sqrt() * 2.0;
            let s = sph_bessel(0, c(ka)).unwrap();
            let delta_h = (s.j / s.n).re.atan();
            let diff = delta_h + ka;
            assert!((diff - PI * (diff / PI).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn rigid_wall_limit() {
        let m: Model = DeltaShell::new(1e6, 1.0).unwrap().into();
        let d = phase_shift_bar(&m, PI * PI).unwrap().value();
        assert!((d - PI * (d / PI).round()).abs() < 1e-3);
    }

    #[test]
    fn free_phase_shift() {
        let m: Model = SquareWell::new(0.0, 2.0, 0).unwrap().into();
        let d = phase_shift_bar(&m, 1.0).unwrap().value();
        let diff = d - 2.0;
        assert!((diff - PI * (diff / PI).round()).abs() < 1e-12);
    }

    #[test]
    fn delta_shell_threshold_phase_vanishes() {
        let m: Model = DeltaShell::new(10.0, 1.0).unwrap().into();
        let small = phase_shift_bar(&m, 1e-8).unwrap().value();
        let smaller = phase_shift_bar(&m, 1e-10).unwrap().value();
        assert!(small.abs() < 1e-4);
        assert!(smaller.abs() < small.abs());
    }

    #[test]
    fn free_delay() {
        let m: Model = SquareWell::new(0.0, 10.0, 0).unwrap().into();
        let t = time_delay(&m, 4.0, default_step(4.0)).unwrap();
        assert!((t - 2.5).abs() < 1e-8);
        let w = SquareWell::new(0.0, 10.0, 0).unwrap();
        assert!((time_delay_square_well_analytic(&w, 4.0).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn weak_shell_is_free() {
        let d = DeltaShell::new(1e-9, 1.0).unwrap();
        let t = time_delay_delta_shell_analytic(&d, 4.0).unwrap();
        assert!((t - 0.25).abs() < 1e-8);
    }

    #[test]
    fn analytic_square_well_matches_tracked_phase_derivative() {
        let w = SquareWell::new(5.0, 10.0, 0).unwrap();
        let m = Model::SquareWell(w);
        let h = 1e-5;
        let ph = tracked_phase_shifts(&m, &[1.0 - h, 1.0 + h]).unwrap();
        let numeric = (ph[1].value() - ph[0].value()) / (2.0 * h);
        let exact = time_delay_square_well_analytic(&w, 1.0).unwrap();
        assert!((numeric - exact).abs() < 1e-7, "{numeric} vs {exact}");
    }

    #[test]
    fn removable_singularity_is_finite() {
        // cos(pa) = 0 at p a = π/2 → E = (π/20)² - 5 < 0; pick the 8th zero instead.
        let w = SquareWell::new(5.0, 10.0, 0).unwrap();
        let p = 7.5 * PI / 10.0;
        let e = p * p - 5.0;
        let at = time_delay_square_well_analytic(&w, e).unwrap();
        let near = time_delay_square_well_analytic(&w, e + 1e-9).unwrap();
        assert!(at.is_finite() && (at - near).abs() < 1e-6);
    }

    #[test]
    fn delta_shell_delay_peak_sits_below_rigid_wall_level() {
        let d = DeltaShell::new(10.0, 1.0).unwrap();
        // dense scan for the first maximum
        let (mut best_e, mut best_t) = (0.0, f64::NEG_INFINITY);
        for i in 1..=20000 {
            let e = 5.0 + i as f64 * 5e-4;
            let t = time_delay_delta_shell_analytic(&d, e).unwrap();
            if t > best_t {
                best_t = t;
                best_e = e;
            }
        }
        assert!(best_e < PI * PI && best_e > 7.0, "{best_e}");
    }

    #[test]
    fn invalid_inputs() {
        assert!(SquareWell::new(1.0, 0.0, 0).is_err());
        assert!(SquareWell::new(1.0, 1.0, 31).is_err());
        assert!(DeltaShell::new(-1.0, 1.0).is_err());
        let m: Model = DeltaShell::new(1.0, 1.0).unwrap().into();
        assert!(phase_shift_bar(&m, 0.0).is_err());
        let w = SquareWell::new(1.0, 1.0, 2).unwrap();
        assert_eq!(
            time_delay_square_well_analytic(&w, 1.0),
            Err(ScatteringError::NotSWave(2))
        );
    }

    proptest::proptest! {
        #[test]
        fn unitary_on_real_axis(
            depth in -20.0..20.0f64,
            a in 0.2..10.0f64,
            l in 0u32..=10,
            strength in 0.1..20.0f64,
            e in 1e-3..50.0f64,
        ) {
            let well: Model = SquareWell::new(depth, a, l).unwrap().into();
            let shell: Model = DeltaShell::new(strength, a.min(5.0)).unwrap().into();
            for m in [well, shell] {
                let s = m.s_matrix(c(e)).unwrap();
                proptest::prop_assert!((s.norm() - 1.0).abs() <= 1e-10, "{:?} E={}", m, e);
            }
        }
    }
}
