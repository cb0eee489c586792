//! Resonance extraction from tabulated elastic phase shifts.
//!
//! A table of `(W, δ)` in MeV and degrees is unwrapped, optionally smoothed,
//! and differentiated to give the delay `dδ/dW` in ħ/MeV. The highest peak
//! gives the mass, `2/height` the width, and the trapezoidal integral over
//! the table range divided by π gives `n_R`.
//!
//! Input format: UTF-8 CSV, `#` comment lines, header `W_MeV,delta_deg` with
//! an optional third column `err_deg`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::gamma_from_peak;
use crate::numerics::{find_extrema, uniform_grid, Curve, CurveError, ExtremumKind};

pub const MIN_ROWS: usize = 5;

/// Bundled π⁺p P33 table. Model-generated, see the header of
/// `data/p33.csv`; not a measured data set.
pub const P33_FIXTURE: &str = include_str!("../data/p33.csv");

pub fn bundled_p33() -> PhaseTable {
    parse_phase_table(P33_FIXTURE, "data/p33.csv").expect("bundled table is valid")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseDataError {
    #[error("ParseError at line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("MonotonicityError at line {line}: W = {w} does not exceed the previous row")]
    MonotonicityError { line: u64, w: f64 },
    #[error("DuplicateEnergy at line {line}: W = {w} repeated")]
    DuplicateEnergy { line: u64, w: f64 },
    #[error("TooFewRows: {0} rows, need at least {MIN_ROWS}")]
    TooFewRows(usize),
    #[error("InvalidWindow: smoothing window must be odd and >= 1, got {0}")]
    InvalidWindow(usize),
    #[error("InvalidParameters: {0}")]
    InvalidParameters(String),
    #[error("RangeOutsideCurve: [{lo}, {hi}] has fewer than 3 samples")]
    RangeOutsideCurve { lo: f64, hi: f64 },
    #[error("NoPeak: delay has no interior maximum on [{lo}, {hi}]")]
    NoPeak { lo: f64, hi: f64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub w: f64,
    pub delta_deg: f64,
    pub err_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    rows: Vec<PhaseRow>,
    pub source: String,
}

impl PhaseTable {
    /// Validates W strictly increasing, `|δ| <= 360°`, and `MIN_ROWS` rows.
    /// Line numbers in errors are 1-based row positions when not parsed from
    /// text.
    pub fn new(rows: Vec<PhaseRow>, source: impl Into<String>) -> Result<Self, PhaseDataError> {
        let lines: Vec<u64> = (1..=rows.len() as u64).collect();
        Self::with_lines(rows, &lines, source.into())
    }

    fn with_lines(rows: Vec<PhaseRow>, lines: &[u64], source: String) -> Result<Self, PhaseDataError> {
        for (i, row) in rows.iter().enumerate() {
            let line = lines[i];
            if !row.w.is_finite() || !row.delta_deg.is_finite() {
                return Err(PhaseDataError::ParseError {
                    line,
                    message: "non-finite value".into(),
                });
            }
            if row.delta_deg.abs() > 360.0 {
                return Err(PhaseDataError::ParseError {
                    line,
                    message: format!("|delta| = {} exceeds 360 degrees", row.delta_deg.abs()),
                });
            }
            if i > 0 {
                let prev = rows[i - 1].w;
                if row.w == prev {
                    return Err(PhaseDataError::DuplicateEnergy { line, w: row.w });
                }
                if row.w < prev {
                    return Err(PhaseDataError::MonotonicityError { line, w: row.w });
                }
            }
        }
        if rows.len() < MIN_ROWS {
            return Err(PhaseDataError::TooFewRows(rows.len()));
        }
        Ok(Self { rows, source })
    }

    pub fn rows(&self) -> &[PhaseRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.w).collect()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rows[0].w, self.rows[self.rows.len() - 1].w)
    }
}

const HEADER: [&str; 3] = ["W_MeV", "delta_deg", "err_deg"];

pub fn parse_phase_table(text: &str, source: impl Into<String>) -> Result<PhaseTable, PhaseDataError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header_err = |line: u64, message: String| PhaseDataError::ParseError { line, message };
    let headers = reader
        .headers()
        .map_err(|e| header_err(1, e.to_string()))?
        .clone();
    let header_line = headers.position().map_or(1, |p| p.line());
    let names: Vec<&str> = headers.iter().collect();
    if !(names == HEADER[..2] || names == HEADER) {
        return Err(header_err(
            header_line,
            format!(
                "expected header W_MeV,delta_deg[,err_deg], got {}",
                names.join(",")
            ),
        ));
    }
    let width = names.len();

    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            header_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(header_err(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let field = |i: usize| -> Result<f64, PhaseDataError> {
            record[i]
                .parse::<f64>()
                .map_err(|e| header_err(line, format!("{}: {e} ({:?})", HEADER[i], &record[i])))
        };
        rows.push(PhaseRow {
            w: field(0)?,
            delta_deg: field(1)?,
            err_deg: if width == 3 { Some(field(2)?) } else { None },
        });
        lines.push(line);
    }
    PhaseTable::with_lines(rows, &lines, source.into())
}

/// Removes jumps larger than half a `period` between adjacent samples.
pub fn unwrap(values: &[f64], period: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    let mut shift = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            let d = v + shift - out[i - 1];
            shift -= period * (d / period).round();
        }
        out.push(v + shift);
    }
    out
}

/// Centred moving average; near the ends the window shrinks symmetrically.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<f64>, PhaseDataError> {
    if window == 0 || window % 2 == 0 {
        return Err(PhaseDataError::InvalidWindow(window));
    }
    let n = values.len();
    let half = window / 2;
    Ok((0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let s = &values[i - h..=i + h];
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect())
}

/// Second-order derivative on a nonuniform grid: three-point central
/// differences inside, three-point one-sided formulas at the ends.
pub fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3 && y.len() == n);
    let three = |x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, at: f64| {
        // derivative at `at` of the parabola through the three points
        let l0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let l1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let l2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
        y0 * l0 + y1 * l1 + y2 * l2
    };
    (0..n)
        .map(|i| {
            let j = i.clamp(1, n - 2);
            three(x[j - 1], x[j], x[j + 1], y[j - 1], y[j], y[j + 1], x[i])
        })
        .collect()
}

/// `dδ/dW` in radians per unit of `w`, from phases in radians.
pub fn delay_from_phase(w: &[f64], phase_rad: &[f64], smooth_window: usize) -> Result<Curve, PhaseDataError> {
    if w.len() < MIN_ROWS {
        return Err(PhaseDataError::TooFewRows(w.len()));
    }
    let phase = moving_average(&unwrap(phase_rad, 2.0 * PI), smooth_window)?;
    Ok(Curve::new("delay", w.to_vec(), derivative(w, &phase))?)
}

/// Delay curve `dδ/dW` (ħ/MeV) of a degree-valued table.
pub fn delay_from_table(table: &PhaseTable, smooth_window: usize) -> Result<Curve, PhaseDataError> {
    let rad: Vec<f64> = table.rows.iter().map(|r| r.delta_deg.to_radians()).collect();
    delay_from_phase(&table.energies(), &rad, smooth_window)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub m: f64,
    pub gamma: f64,
    pub n_r: f64,
    pub w_range: (f64, f64),
}

pub fn extract_resonance(curve: &Curve, w_lo: f64, w_hi: f64) -> Result<ResonanceReport, PhaseDataError> {
    let (e, v): (Vec<f64>, Vec<f64>) = curve
        .energies()
        .iter()
        .zip(curve.values())
        .filter(|(&w, _)| w >= w_lo && w <= w_hi)
        .map(|(&w, &t)| (w, t))
        .unzip();
    if e.len() < 3 {
        return Err(PhaseDataError::RangeOutsideCurve { lo: w_lo, hi: w_hi });
    }
    let window = Curve::new(curve.label.clone(), e, v)?;
    let peak = find_extrema(&window)
        .into_iter()
        .filter(|p| p.kind == ExtremumKind::Max)
        .max_by(|a, b| a.height.total_cmp(&b.height))
        .ok_or(PhaseDataError::NoPeak { lo: w_lo, hi: w_hi })?;
    let gamma = gamma_from_peak(peak.height).map_err(|_| PhaseDataError::NoPeak { lo: w_lo, hi: w_hi })?;
    Ok(ResonanceReport {
        m: peak.position,
        gamma,
        n_r: window.trapezoid() / PI,
        w_range: window.range().expect("at least three samples"),
    })
}

/// Breit–Wigner phase `atan((Γ/2)/(M - W))` taken continuously through 90°
/// at `W = M`, plus a linear background, on `n` uniform points.
pub fn synth_phase_table(
    m: f64,
    gamma: f64,
    background_slope: f64,
    w_lo: f64,
    w_hi: f64,
    n: usize,
) -> Result<PhaseTable, PhaseDataError> {
    if !(gamma > 0.0) {
        return Err(PhaseDataError::InvalidParameters(format!(
            "Gamma must be positive, got {gamma}"
        )));
    }
    if n < MIN_ROWS {
        return Err(PhaseDataError::TooFewRows(n));
    }
    let grid = uniform_grid(w_lo, w_hi, n).ok_or(CurveError::BadGrid)?;
    let rows = grid
        .into_iter()
        .map(|w| PhaseRow {
            w,
            delta_deg: ((0.5 * gamma).atan2(m - w) + background_slope * (w - w_lo)).to_degrees(),
            err_deg: None,
        })
        .collect();
    PhaseTable::new(
        rows,
        format!("synthetic Breit-Wigner M={m} Gamma={gamma} slope={background_slope}"),
    )
}
