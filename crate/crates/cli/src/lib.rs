//! End-to-end runs behind the `timedelay` binary: one pipeline per model,
//! each producing a [`Report`] plus figure-ready CSV curves.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use timedelay::counting::{count_resonances, reconstruction_report, CountReport, ReconstructionReport};
use timedelay::numerics::{find_extrema, Curve, CurveError, ExtremumKind};
use timedelay::phasedata::{
    bundled_p33, delay_from_table, extract_resonance, parse_phase_table, PhaseDataError, ResonanceReport,
};
use timedelay::poles::{survey_poles, Classification, Pole, PoleError, SearchRegion};
use timedelay::reflect::{reflection_time_delay, reflectivity_curve, theta_curve, ExpStep, ReflectError};
use timedelay::scattering::{
    default_step, time_delay, time_delay_delta_shell_analytic, time_delay_square_well_analytic, DeltaShell,
    Model, ScatteringError, SquareWell, E_MIN,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON schema that every `report.json` validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

/// Smallest accepted `--grid`.
pub const MIN_GRID: usize = 16;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<ScatteringError> for RunError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::InvalidModel(_) | ScatteringError::InvalidEnergy(_) => {
                RunError::Validation(e.to_string())
            }
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<ReflectError> for RunError {
    fn from(e: ReflectError) -> Self {
        match e {
            ReflectError::InvalidStep(_) | ReflectError::InvalidEnergy(_) => {
                RunError::Validation(e.to_string())
            }
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<PhaseDataError> for RunError {
    fn from(e: PhaseDataError) -> Self {
        match e {
            PhaseDataError::ParseError { .. }
            | PhaseDataError::MonotonicityError { .. }
            | PhaseDataError::DuplicateEnergy { .. }
            | PhaseDataError::TooFewRows(_)
            | PhaseDataError::InvalidWindow(_)
            | PhaseDataError::InvalidParameters(_)
            | PhaseDataError::RangeOutsideCurve { .. } => RunError::Validation(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<PoleError> for RunError {
    fn from(e: PoleError) -> Self {
        match e {
            PoleError::InvalidRegion(_) => RunError::Validation(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<CurveError> for RunError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::BadGrid => RunError::Validation(format!("CurveError: {e}")),
            _ => RunError::Numerical(format!("CurveError: {e}")),
        }
    }
}

impl From<timedelay::counting::CountingError> for RunError {
    fn from(e: timedelay::counting::CountingError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum ModelConfig {
    /// `V(r < a) = -v0`.
    Sqwell {
        v0: f64,
        a: f64,
        l: u32,
    },
    /// `V(r) = v0 δ(r - a)`.
    Deltashell {
        v0: f64,
        a: f64,
    },
    Step {
        v1: f64,
        v2: f64,
        a: f64,
    },
    Data {
        /// `None` selects the bundled P33 table.
        file: Option<PathBuf>,
        smooth: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub emin: f64,
    pub emax: f64,
    pub grid: usize,
    pub tol: f64,
    /// Resonance poles summed in the Lorentzian reconstruction.
    pub poles: usize,
    /// Lower edge of the reconstruction error window.
    pub recon_emin: f64,
    pub out: PathBuf,
    pub format: Format,
}

impl RunConfig {
    /// Parameter sets of the worked examples: each bare subcommand
    /// reproduces one of them.
    pub fn defaults(model: ModelConfig) -> Self {
        let (emin, emax, poles, recon_emin) = match &model {
            ModelConfig::Sqwell { .. } => (E_MIN, 10.0, 15, 0.5),
            ModelConfig::Deltashell { .. } => (E_MIN, 170.0, 4, 1.0),
            ModelConfig::Step { .. } => (2.0, 10.0, 0, 0.0),
            ModelConfig::Data { .. } => (f64::NAN, f64::NAN, 0, 0.0),
        };
        Self {
            model,
            emin,
            emax,
            grid: 2001,
            tol: 1e-6,
            poles,
            recon_emin,
            out: PathBuf::from("."),
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Validation(format!("InvalidConfig: {m}")));
        if self.grid < MIN_GRID {
            return bad(format!("--grid must be at least {MIN_GRID}, got {}", self.grid));
        }
        if !(self.tol > 0.0) {
            return bad(format!("--tol must be positive, got {}", self.tol));
        }
        if matches!(self.model, ModelConfig::Data { .. }) {
            // unset (NaN) bounds fall back to the table range
            if self.emin.is_finite() && self.emax.is_finite() && !(self.emin < self.emax) {
                return bad(format!("need emin < emax, got {} and {}", self.emin, self.emax));
            }
            return Ok(());
        }
        if !(self.emin < self.emax) || !self.emin.is_finite() || !self.emax.is_finite() {
            return bad(format!("need emin < emax, got {} and {}", self.emin, self.emax));
        }
        if self.emin < 0.0 {
            return bad(format!("emin must be non-negative, got {}", self.emin));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipReport {
    /// Interior minimum of `R(E)`.
    pub position: f64,
    pub reflectivity: f64,
    /// Delay extremum closest to the dip.
    pub delay_extremum: Option<f64>,
    pub delay_at_extremum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config: RunConfig,
    /// How the delay was obtained: `analytic`, `numerical`, `phase-table`.
    pub delay_method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub poles: Vec<Pole>,
    pub count: CountReport,
    pub reconstruction: Option<ReconstructionReport>,
    /// Number of interior delay maxima on `[emin, emax]`.
    pub delay_peaks: usize,
    pub dip: Option<DipReport>,
    pub resonance: Option<ResonanceReport>,
    pub curves: Vec<Curve>,
    pub provenance: Provenance,
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    config.validate()?;
    match &config.model {
        ModelConfig::Sqwell { v0, a, l } => {
            let model: Model = SquareWell::new(*v0, *a, *l)?.into();
            run_scattering(
                config,
                &model,
                &format!("fig1a_l{l}"),
                Some(&format!("fig1b_l{l}")),
            )
        }
        ModelConfig::Deltashell { v0, a } => {
            let model: Model = DeltaShell::new(*v0, *a)?.into();
            run_scattering(config, &model, "fig2", None)
        }
        ModelConfig::Step { v1, v2, a } => run_step(config, &ExpStep::new(*v1, *v2, *a)?),
        ModelConfig::Data { file, smooth } => run_data(config, file.as_deref(), *smooth),
    }
}

/// Analytic delay where a closed form exists, numerical otherwise.
fn model_delay(model: &Model, e: f64) -> Result<f64, ScatteringError> {
    match model {
        Model::SquareWell(w) if w.l == 0 => time_delay_square_well_analytic(w, e),
        Model::DeltaShell(d) => time_delay_delta_shell_analytic(d, e),
        _ => time_delay(model, e, default_step(e)),
    }
}

fn delay_method(model: &Model) -> &'static str {
    match model {
        Model::SquareWell(w) if w.l != 0 => "numerical",
        _ => "analytic",
    }
}

// The pole search and its classification curve extend this far past emax,
// since poles above the window still shape the delay inside it.
const SEARCH_SPAN: f64 = 6.0;
const SEEDS_RE: usize = 600;
const SEEDS_IM: usize = 30;
const POLE_TOL: f64 = 1e-12;

fn delay_curve(model: &Model, label: &str, lo: f64, hi: f64, n: usize) -> Result<Curve, RunError> {
    Curve::try_from_fn(label, lo, hi, n, |e| {
        model_delay(model, e).map_err(RunError::from)
    })
}

fn run_scattering(
    config: &RunConfig,
    model: &Model,
    fig: &str,
    zoom: Option<&str>,
) -> Result<Report, RunError> {
    let lo = config.emin.max(E_MIN);
    let hi = config.emax;
    let exact = delay_curve(model, &format!("{fig}_exact"), lo, hi, config.grid)?;

    let search_hi = SEARCH_SPAN * hi;
    let wide = delay_curve(
        model,
        "classification",
        lo,
        search_hi,
        (SEARCH_SPAN as usize) * config.grid,
    )?;
    let region = SearchRegion::new(0.0, search_hi, -0.5 * hi.max(1.0), SEEDS_RE, SEEDS_IM)?;
    let search = survey_poles(model, &region, &wide, POLE_TOL);
    let resonances: Vec<Pole> = search
        .poles
        .iter()
        .filter(|p| p.classification == Classification::Resonance)
        .take(config.poles)
        .copied()
        .collect();

    let lorentz = |label: &str, c: &Curve| -> Result<Curve, RunError> {
        let values = c
            .energies()
            .iter()
            .map(|&e| timedelay::counting::breit_wigner_sum(&resonances, e))
            .collect();
        Ok(Curve::new(label, c.energies().to_vec(), values)?)
    };

    let count = count_resonances(
        |e| model_delay(model, e).unwrap_or(f64::NAN),
        config.emin,
        hi,
        config.tol,
    )?;
    let recon_lo = config.recon_emin.max(lo);
    let reconstruction = if recon_lo < hi {
        let window = delay_curve(model, "reconstruction", recon_lo, hi, config.grid)?;
        Some(reconstruction_report(&window, &resonances))
    } else {
        None
    };

    let mut curves = vec![lorentz(&format!("{fig}_lorentzian"), &exact)?, exact.clone()];
    curves.swap(0, 1);
    if let (Some(zoom), Some(first)) = (zoom, resonances.first()) {
        let (e1, g1) = (first.position(), first.width());
        let (zlo, zhi) = ((e1 - 3.0 * g1).max(lo), (e1 + 3.0 * g1).min(hi));
        if zlo < zhi {
            let c = delay_curve(model, &format!("{zoom}_exact"), zlo, zhi, config.grid)?;
            curves.push(c.clone());
            curves.push(lorentz(&format!("{zoom}_lorentzian"), &c)?);
        }
    }

    Ok(Report {
        poles: search.poles,
        count,
        reconstruction,
        delay_peaks: count_maxima(&exact),
        dip: None,
        resonance: None,
        curves,
        provenance: provenance(config, delay_method(model)),
    })
}

fn count_maxima(c: &Curve) -> usize {
    find_extrema(c)
        .iter()
        .filter(|p| p.kind == ExtremumKind::Max)
        .count()
}

// Distance kept from the threshold branch point, above the delay's own guard.
const THRESHOLD_OFFSET: f64 = 2e-6;

fn run_step(config: &RunConfig, step: &ExpStep) -> Result<Report, RunError> {
    let lo = config.emin.max(step.threshold() + THRESHOLD_OFFSET);
    let hi = config.emax;
    if !(lo < hi) {
        return Err(RunError::Validation(format!(
            "InvalidConfig: emax must exceed the threshold V1 + V2 = {}",
            step.threshold()
        )));
    }
    let mut reflectivity = reflectivity_curve(step, lo, hi, config.grid)?;
    reflectivity.label = "fig3_reflectivity".into();
    let mut theta = theta_curve(step, lo, hi, config.grid)?;
    theta.label = "fig3_theta".into();
    let delay = Curve::try_from_fn("fig3_delay", lo, hi, config.grid, |e| {
        reflection_time_delay(step, e).map_err(RunError::from)
    })?;

    let dip = find_extrema(&reflectivity)
        .into_iter()
        .filter(|p| p.kind == ExtremumKind::Min)
        .min_by(|a, b| a.height.total_cmp(&b.height))
        .map(|d| {
            let ext = find_extrema(&delay).into_iter().min_by(|a, b| {
                (a.position - d.position)
                    .abs()
                    .total_cmp(&(b.position - d.position).abs())
            });
            DipReport {
                position: d.position,
                reflectivity: d.height,
                delay_extremum: ext.map(|p| p.position),
                delay_at_extremum: ext.map(|p| p.height),
            }
        });

    let count = count_resonances(
        |e| reflection_time_delay(step, e).unwrap_or(f64::NAN),
        lo,
        hi,
        config.tol,
    )?;
    Ok(Report {
        poles: Vec::new(),
        count,
        reconstruction: None,
        delay_peaks: count_maxima(&delay),
        dip,
        resonance: None,
        curves: vec![reflectivity, theta, delay],
        provenance: provenance(config, "numerical"),
    })
}

fn run_data(config: &RunConfig, file: Option<&Path>, smooth: usize) -> Result<Report, RunError> {
    let table = match file {
        Some(path) => {
            // an unreadable input table is a bad argument, not an output failure
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Validation(format!("InputFile: {}: {e}", path.display())))?;
            parse_phase_table(&text, path.display().to_string())?
        }
        None => bundled_p33(),
    };
    let mut delay = delay_from_table(&table, smooth)?;
    delay.label = "fig4_delay".into();
    let (tlo, thi) = table.range();
    let lo = if config.emin.is_finite() { config.emin } else { tlo };
    let hi = if config.emax.is_finite() { config.emax } else { thi };
    let resonance: ResonanceReport = extract_resonance(&delay, lo, hi)?;
    let phase = Curve::new(
        "fig4_phase_deg",
        table.energies(),
        table.rows().iter().map(|r| r.delta_deg).collect(),
    )?;
    let count = CountReport::from_value(resonance.n_r, resonance.w_range, 0.0, table.len());
    Ok(Report {
        poles: Vec::new(),
        count,
        reconstruction: None,
        delay_peaks: count_maxima(&delay),
        dip: None,
        resonance: Some(resonance),
        curves: vec![delay, phase],
        // echo the resolved window so the report carries no unset bounds
        provenance: provenance(
            &RunConfig {
                emin: lo,
                emax: hi,
                ..config.clone()
            },
            "phase-table",
        ),
    })
}

fn provenance(config: &RunConfig, method: &str) -> Provenance {
    Provenance {
        version: VERSION.to_string(),
        config: config.clone(),
        delay_method: method.to_string(),
    }
}

/// Two-column `E,value` CSV, LF line endings, 17 significant digits.
pub fn curve_csv(curve: &Curve) -> String {
    let mut s = String::from("E,value\n");
    for (e, v) in curve.energies().iter().zip(curve.values()) {
        writeln!(s, "{e:.16e},{v:.16e}").expect("writing to a String cannot fail");
    }
    s
}

/// Writes `report.json`, plus one CSV per curve when the format is CSV.
/// Returns the paths written, in order.
pub fn write_outputs(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format == Format::Csv {
        for c in &report.curves {
            let path = dir.join(format!("{}.csv", c.label));
            fs::write(&path, curve_csv(c))?;
            written.push(path);
        }
    }
    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report).map_err(|e| RunError::Numerical(e.to_string()))?;
    fs::write(&path, json + "\n")?;
    written.push(path);
    Ok(written)
}

/// One-paragraph plain-text summary for the terminal.
pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    let c = &report.count;
    let _ = writeln!(
        s,
        "n_R = {:.6} (N = {}, Delta = {:.6}) on [{}, {}]; delay peaks = {}",
        c.n_r, c.n, c.delta, c.e_range.0, c.e_range.1, report.delay_peaks
    );
    for p in &report.poles {
        let _ = writeln!(
            s,
            "pole {:.6} {:+.6}i  {:?}",
            p.energy.re, p.energy.im, p.classification
        );
    }
    if let Some(r) = &report.reconstruction {
        let _ = writeln!(
            s,
            "reconstruction with {} poles: max rel error {:.4}, L2 {:.4}",
            r.poles_used, r.max_rel_error, r.l2_rel_error
        );
    }
    if let Some(d) = &report.dip {
        let _ = writeln!(
            s,
            "reflectivity dip at E = {:.6}, R = {:.3e}",
            d.position, d.reflectivity
        );
        if let (Some(e), Some(t)) = (d.delay_extremum, d.delay_at_extremum) {
            let _ = writeln!(s, "delay extremum at E = {e:.6}, T = {t:.6}");
        }
    }
    if let Some(r) = &report.resonance {
        let _ = writeln!(
            s,
            "resonance M = {:.2}, Gamma = {:.2}, n_R = {:.4}",
            r.m, r.gamma, r.n_r
        );
    }
    s
}
