//! Complex-energy poles of the model S-matrices (Gamow–Siegert states) and
//! their classification into genuine resonances and spurious roots.
//!
//! Poles are zeros of an outgoing-wave matching condition at the interaction
//! radius. They are located by Newton iteration from a rectangular seed grid
//! in the fourth quadrant of the complex energy plane, then deduplicated.
//!
//! A root is a resonance when the real-energy delay curve shows it: either a
//! local maximum near `E_j` whose height-derived width `2ħ/T_max` agrees with
//! `Γ_j`, or, for broad poles with `Γ_j < E_j`, local concavity of the curve
//! at `E_j`. Roots with `Γ_j > E_j` and no matching peak are spurious; their
//! Breit–Wigner profile lies mostly at negative energy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    find_extrema, integrate, newton_complex, principal_sqrt, riccati, sph_bessel, uniform_grid, Curve,
    ExtremumKind, NumericsError,
};
use crate::scattering::{default_step, time_delay, Model, ScatteringError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoleError {
    #[error("CurveTooCoarse: grid step {step} cannot resolve width {gamma}")]
    CurveTooCoarse { step: f64, gamma: f64 },
    #[error("PoleOutsideCurve: E_j = {energy} outside the delay curve [{lo}, {hi}]")]
    PoleOutsideCurve { energy: f64, lo: f64, hi: f64 },
    #[error("InvalidRegion: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Resonance,
    Spurious,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct PoleDiagnostics {
    /// A delay maximum near `E_j` with a consistent width was found.
    pub peak_found: bool,
    /// `Γ_j < E_j` and the delay curve is concave at `E_j`.
    pub broad_concave: bool,
    pub peak_position: Option<f64>,
    /// `2/height` of the matched maximum.
    pub peak_width: Option<f64>,
    /// Interior/exterior mean density of the real-energy wavefunction at `E_j`.
    pub localization: Option<f64>,
    /// `|outgoing_condition|` at the stored energy.
    pub residual: f64,
}

/// A complex pole `E_j - iΓ_j/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub energy: Complex64,
    pub classification: Classification,
    pub diagnostics: PoleDiagnostics,
}

impl Pole {
    pub fn new(energy: Complex64, residual: f64) -> Self {
        Self {
            energy,
            classification: Classification::Unclassified,
            diagnostics: PoleDiagnostics {
                residual,
                ..Default::default()
            },
        }
    }

    /// A pole already known to be a resonance at `position` with `width`.
    pub fn resonance(position: f64, width: f64) -> Self {
        Self {
            classification: Classification::Resonance,
            ..Self::new(Complex64::new(position, -0.5 * width), 0.0)
        }
    }

    pub fn position(&self) -> f64 {
        self.energy.re
    }

    pub fn width(&self) -> f64 {
        -2.0 * self.energy.im
    }
}

/// Rectangle `re ∈ [re_lo, re_hi]`, `im ∈ [im_lo, 0)` seeded with an
/// `n_re × n_im` grid of cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl SearchRegion {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, n_re: usize, n_im: usize) -> Result<Self, PoleError> {
        if !(re_hi > re_lo) || re_lo < 0.0 {
            return Err(PoleError::InvalidRegion(format!(
                "need re_hi > re_lo >= 0, got [{re_lo}, {re_hi}]"
            )));
        }
        if !(im_lo < 0.0) {
            return Err(PoleError::InvalidRegion(format!("need im_lo < 0, got {im_lo}")));
        }
        if n_re < 2 || n_im < 2 {
            return Err(PoleError::InvalidRegion(
                "seed grid needs at least 2x2 points".into(),
            ));
        }
        Ok(Self {
            re_lo,
            re_hi,
            im_lo,
            n_re,
            n_im,
        })
    }

    pub fn gamma_max(&self) -> f64 {
        -2.0 * self.im_lo
    }

    pub fn contains(&self, e: Complex64) -> bool {
        e.re >= self.re_lo && e.re <= self.re_hi && e.im >= self.im_lo && e.im < 0.0
    }

    pub fn seeds(&self) -> impl Iterator<Item = Complex64> + '_ {
        let dre = (self.re_hi - self.re_lo) / self.n_re as f64;
        let dim = -self.im_lo / self.n_im as f64;
        (0..self.n_re).flat_map(move |i| {
            (0..self.n_im).map(move |j| {
                Complex64::new(
                    self.re_lo + (i as f64 + 0.5) * dre,
                    self.im_lo + (j as f64 + 0.5) * dim,
                )
            })
        })
    }
}

/// Residual whose zeros are the S-matrix poles.
///
/// * square well, `l = 0`: `ik tan(pa) - p`
/// * square well, `l > 0`: `p j_l'(pa)/j_l(pa) - k h_l'(ka)/h_l(ka)`
/// * delta shell: `k cos(ka) + (g - ik) sin(ka)`, i.e. `k cot(ka) + g = ik`
///   multiplied through by `sin ka` (finite in the rigid-wall limit)
pub fn outgoing_condition(model: &Model, e: Complex64) -> Result<Complex64, ScatteringError> {
    if e.norm() == 0.0 || !e.is_finite() {
        return Err(ScatteringError::InvalidEnergy(e.re));
    }
    let k = principal_sqrt(e);
    let i = Complex64::i();
    match model {
        Model::SquareWell(w) if w.l == 0 => {
            let p = w.interior_wavenumber(e);
            Ok(i * k * (p * w.radius).tan() - p)
        }
        Model::SquareWell(w) => {
            let p = w.interior_wavenumber(e);
            let inner = sph_bessel(w.l, p * w.radius)?;
            if inner.j.norm() < 1e-14 {
                return Err(ScatteringError::InteriorNode(e));
            }
            let outer = sph_bessel(w.l, k * w.radius)?;
            Ok(p * inner.dj / inner.j - k * outer.dh1 / outer.h1)
        }
        Model::DeltaShell(d) => {
            let ka = k * d.radius;
            Ok(k * ka.cos() + (d.coupling() - i * k) * ka.sin())
        }
    }
}

/// Outcome of [`find_poles`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSearch {
    pub poles: Vec<Pole>,
    /// Seeds whose Newton run did not converge or left the region.
    pub dropped_seeds: usize,
}

const NEWTON_MAX_ITER: usize = 80;

pub fn find_poles(model: &Model, region: &SearchRegion, tol: f64) -> PoleSearch {
    let f = |e: Complex64| outgoing_condition(model, e).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let mut poles: Vec<Pole> = Vec::new();
    let mut dropped = 0;
    for seed in region.seeds() {
        let root = match newton_complex(f, seed, tol, NEWTON_MAX_ITER) {
            Ok(r) if region.contains(r) => r,
            _ => {
                dropped += 1;
                continue;
            }
        };
        let duplicate = poles
            .iter()
            .any(|p| (p.energy - root).norm() < 1e-6 * (1.0 + root.norm()));
        if !duplicate {
            poles.push(Pole::new(root, f(root).norm()));
        }
    }
    poles.sort_by(|a, b| a.energy.re.total_cmp(&b.energy.re));
    PoleSearch {
        poles,
        dropped_seeds: dropped,
    }
}

/// [`find_poles`] followed by [`classify_pole`] against `delay` and a
/// [`localization_ratio`] at each `E_j`. Poles the curve cannot judge (outside
/// its range or too narrow for its grid) stay `Unclassified`.
pub fn survey_poles(model: &Model, region: &SearchRegion, delay: &Curve, tol: f64) -> PoleSearch {
    let mut search = find_poles(model, region, tol);
    for pole in search.poles.iter_mut() {
        match classify_pole(pole, delay) {
            Ok(classified) => *pole = classified,
            Err(PoleError::CurveTooCoarse { .. }) => {
                // narrow pole: resample the delay around it and try again
                if let Some(classified) =
                    local_curve(model, pole, delay).and_then(|c| classify_pole(pole, &c).ok())
                {
                    *pole = classified;
                }
            }
            Err(_) => {}
        }
        if pole.position() > 0.0 {
            pole.diagnostics.localization =
                localization_ratio(model, pole.position(), ExteriorWindow::Asymptotic).ok();
        }
    }
    search
}

/// Delay sampled on `E_j ± 8Γ_j` at `Γ_j/20`, clipped to the range of `delay`.
fn local_curve(model: &Model, pole: &Pole, delay: &Curve) -> Option<Curve> {
    let (lo, hi) = delay.range()?;
    let (e_j, gamma) = (pole.position(), pole.width());
    let a = (e_j - 8.0 * gamma).max(lo);
    let b = (e_j + 8.0 * gamma).min(hi);
    if !(b > a) {
        return None;
    }
    let n = ((b - a) / (gamma / 20.0)).ceil() as usize + 1;
    let grid = uniform_grid(a, b, n.max(16))?;
    let values = grid
        .iter()
        .map(|&e| time_delay(model, e, default_step(e)))
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    Curve::new("local", grid, values).ok()
}

/// Width ratio `2/(height·Γ_j)` accepted as the same resonance.
const WIDTH_AGREEMENT: f64 = 2.0;

/// Fills in [`Pole::classification`] from a real-energy delay curve.
pub fn classify_pole(pole: &Pole, delay: &Curve) -> Result<Pole, PoleError> {
    let (lo, hi) = delay.range().ok_or(PoleError::PoleOutsideCurve {
        energy: pole.position(),
        lo: f64::NAN,
        hi: f64::NAN,
    })?;
    let (e_j, gamma) = (pole.position(), pole.width());
    if e_j.max(lo) > hi {
        return Err(PoleError::PoleOutsideCurve { energy: e_j, lo, hi });
    }
    let step = delay.max_step();
    if step > gamma / 4.0 && gamma < (hi - lo) / 100.0 {
        return Err(PoleError::CurveTooCoarse { step, gamma });
    }

    let window = gamma.max(2.0 * step);
    let matched = find_extrema(delay)
        .into_iter()
        .filter(|p| p.kind == ExtremumKind::Max && p.height > 0.0)
        .filter(|p| (p.position - e_j).abs() <= window)
        .filter(|p| {
            let ratio = (2.0 / p.height) / gamma;
            (1.0 / WIDTH_AGREEMENT..=WIDTH_AGREEMENT).contains(&ratio)
        })
        .min_by(|a, b| (a.position - e_j).abs().total_cmp(&(b.position - e_j).abs()));

    let broad_concave = gamma < e_j && e_j > lo && concave_at(delay, e_j, (2.0 * step).max(gamma / 4.0));

    let mut out = *pole;
    out.diagnostics.peak_found = matched.is_some();
    out.diagnostics.peak_position = matched.map(|p| p.position);
    out.diagnostics.peak_width = matched.map(|p| 2.0 / p.height);
    out.diagnostics.broad_concave = broad_concave;
    out.classification = if matched.is_some() || broad_concave {
        Classification::Resonance
    } else {
        Classification::Spurious
    };
    Ok(out)
}

fn concave_at(curve: &Curve, e: f64, h: f64) -> bool {
    let (lo, hi) = match curve.range() {
        Some(r) => r,
        None => return false,
    };
    let h = h.min(e - lo).min(hi - e);
    if !(h > 0.0) {
        return false;
    }
    match (
        curve.interpolate(e - h),
        curve.interpolate(e),
        curve.interpolate(e + h),
    ) {
        (Some(a), Some(b), Some(c)) => a - 2.0 * b + c < 0.0,
        _ => false,
    }
}

/// Exterior reference for [`localization_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExteriorWindow {
    /// Period-averaged density of the outside wave, `(|α|² + |β|²)/2`.
    Asymptotic,
    /// Mean density over `(a, a(1 + f))`.
    Span(f64),
}

/// Mean `|u|²` of the regular real-energy solution inside `r < a` divided by
/// its mean outside. Large values mean the state is trapped inside.
pub fn localization_ratio(model: &Model, e: f64, window: ExteriorWindow) -> Result<f64, PoleError> {
    if !(e > 0.0) {
        return Err(ScatteringError::InvalidEnergy(e).into());
    }
    let a = model.radius();
    let l = model.angular_momentum();
    let k = e.sqrt();
    let kc = Complex64::new(k, 0.0);
    let p = match model {
        Model::SquareWell(w) => w.interior_wavenumber(Complex64::new(e, 0.0)),
        Model::DeltaShell(_) => kc,
    };

    // Regular solution u = ĵ_l(p r) inside.
    let (u_a, du_in, _, _) = riccati(l, p * a)?;
    let mut du = p * du_in;
    if let Model::DeltaShell(d) = model {
        du += d.coupling() * u_a;
    }
    let (jo, djo, no, dno) = riccati(l, kc * a)?;
    let alpha = u_a * dno - du / k * no;
    let beta = du / k * jo - u_a * djo;

    let interior = if l == 0 {
        mean_sin_squared(p, a)
    } else {
        let q = integrate(
            |r| riccati(l, p * r).map(|v| v.0.norm_sqr()).unwrap_or(f64::NAN),
            1e-12 * a,
            a,
            1e-10,
        )?;
        q.value / a
    };

    let exterior = match window {
        ExteriorWindow::Asymptotic => 0.5 * (alpha.norm_sqr() + beta.norm_sqr()),
        ExteriorWindow::Span(f) => {
            let q = integrate(
                |r| {
                    riccati(l, kc * r)
                        .map(|(j, _, n, _)| (alpha * j + beta * n).norm_sqr())
                        .unwrap_or(f64::NAN)
                },
                a,
                a * (1.0 + f),
                1e-12,
            )?;
            q.value / (a * f)
        }
    };
    Ok(interior / exterior)
}

/// `(1/a) ∫_0^a |sin(p r)|² dr` for complex `p`.
fn mean_sin_squared(p: Complex64, a: f64) -> f64 {
    // |sin(x + iy)|² = (cosh 2y - cos 2x)/2
    let (pr, pi) = (p.re, p.im);
    let cosh_part = if pi.abs() * a < 1e-8 {
        a
    } else {
        (2.0 * pi * a).sinh() / (2.0 * pi)
    };
    let cos_part = if pr.abs() * a < 1e-8 {
        a
    } else {
        (2.0 * pr * a).sin() / (2.0 * pr)
    };
    0.5 * (cosh_part - cos_part) / a
}
