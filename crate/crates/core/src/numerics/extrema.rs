use serde::{Deserialize, Serialize};

use super::Curve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    pub kind: ExtremumKind,
    /// Index of the grid sample that bracketed the extremum.
    pub index: usize,
}

pub type PeakList = Vec<Peak>;

/// Interior local maxima and minima of a sampled curve.
///
/// A sample strictly above (below) both neighbours marks a maximum
/// (minimum); its position and height come from the parabola through the
/// bracketing triple. Endpoints are never reported.
pub fn find_extrema(curve: &Curve) -> PeakList {
    let e = curve.energies();
    let v = curve.values();
    let mut out = Vec::new();
    if e.len() < 3 {
        return out;
    }
    for i in 1..e.len() - 1 {
        let kind = if v[i] > v[i - 1] && v[i] > v[i + 1] {
            ExtremumKind::Max
        } else if v[i] < v[i - 1] && v[i] < v[i + 1] {
            ExtremumKind::Min
        } else {
            continue;
        };
        let (position, height) = parabola_vertex((e[i - 1], v[i - 1]), (e[i], v[i]), (e[i + 1], v[i + 1]));
        out.push(Peak {
            position,
            height,
            kind,
            index: i,
        });
    }
    out
}

fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    // Newton form: y = y0 + d1 (x - x0) + c (x - x0)(x - x1)
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let c = (d2 - d1) / (x2 - x0);
    if c == 0.0 || !c.is_finite() {
        return (x1, y1);
    }
    let xv = (0.5 * (x0 + x1) - d1 / (2.0 * c)).clamp(x0, x2);
    let yv = y0 + d1 * (xv - x0) + c * (xv - x0) * (xv - x1);
    (xv, yv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz(e: f64, e0: f64, g: f64) -> f64 {
        (g / 2.0) / ((e - e0).powi(2) + g * g / 4.0)
    }

    #[test]
    fn single_lorentzian() {
        let (e0, g) = (3.3, 0.4);
        let c = Curve::from_fn("l", e0 - 10.0 * g, e0 + 10.0 * g, 401, |e| lorentz(e, e0, g)).unwrap();
        let peaks = find_extrema(&c);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].kind, ExtremumKind::Max);
        assert!((peaks[0].position - e0).abs() < c.max_step());
        assert!((peaks[0].height - 2.0 / g).abs() / (2.0 / g) < 1e-3);
    }

    #[test]
    fn monotone_curve_has_no_extrema() {
        let c = Curve::from_fn("m", 0.0, 1.0, 50, |e| e.exp()).unwrap();
        assert!(find_extrema(&c).is_empty());
    }

    #[test]
    fn two_lorentzians_against_dense_scan() {
        let f = |e: f64| lorentz(e, 2.0, 0.5) + lorentz(e, 8.0, 0.5);
        // Dense brute-force scan: argmax on a 1e-5 grid in each half.
        let argmax = |lo: f64, hi: f64| {
            let n = ((hi - lo) / 1e-5) as usize;
            (0..=n)
                .map(|i| lo + i as f64 * 1e-5)
                .max_by(|a, b| f(*a).partial_cmp(&f(*b)).unwrap())
                .unwrap()
        };
        let oracle = [argmax(0.0, 5.0), argmax(5.0, 10.0)];
        let c = Curve::from_fn("two", 0.0, 10.0, 201, |e| f(e)).unwrap();
        let maxima: Vec<_> = find_extrema(&c)
            .into_iter()
            .filter(|p| p.kind == ExtremumKind::Max)
            .collect();
        assert_eq!(maxima.len(), 2);
        for (p, o) in maxima.iter().zip(oracle) {
            assert!((p.position - o).abs() / o < 0.01);
        }
    }

    #[test]
    fn minima_are_reported() {
        let c = Curve::from_fn("cos", 0.0, 6.0, 100, |e| e.cos()).unwrap();
        let p = find_extrema(&c);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].kind, ExtremumKind::Min);
        assert!((p[0].position - std::f64::consts::PI).abs() < 1e-3);
    }
}
