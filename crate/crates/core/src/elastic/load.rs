//! Surface loads `p(y, t)` and their Fourier images in `y`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{C64, I};
use crate::quadrature::{gl15, panels};

use super::ElasticError;

/// Time envelope of a separable load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TimeProfile {
    /// `(1 - cos(π t / rise)) / 2` up to `rise`, then 1.
    Ramp { rise: f64 },
    /// `sin²(π t / duration)` on `[0, duration]`, zero afterwards.
    Pulse { duration: f64 },
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            TimeProfile::Ramp { rise } => {
                if t >= rise {
                    1.0
                } else {
                    0.5 * (1.0 - (PI * t / rise).cos())
                }
            }
            TimeProfile::Pulse { duration } => {
                if t >= duration {
                    0.0
                } else {
                    (PI * t / duration).sin().powi(2)
                }
            }
        }
    }

    /// Shortest time over which the envelope changes appreciably.
    pub fn time_scale(&self) -> f64 {
        match *self {
            TimeProfile::Ramp { rise } => rise,
            TimeProfile::Pulse { duration } => 0.5 * duration,
        }
    }

    /// Points where the envelope is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            TimeProfile::Ramp { rise } => vec![rise],
            TimeProfile::Pulse { duration } => vec![duration],
        }
    }
}

/// Surface pressure `p(y, t)`, zero for `t < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Load {
    /// `amplitude · exp(-((y - center) / width)²) · ramp(t)`.
    Gaussian { amplitude: f64, center: f64, width: f64, rise: f64 },
    /// `amplitude · exp(-((y - center) / width)²) · sin²(π t / duration)` while `t < duration`.
    Pulse { amplitude: f64, center: f64, width: f64, duration: f64 },
    /// Bilinear interpolation of samples `values[i][j] = p(y[i], t[j])`; zero outside the `y` range.
    Table { y: Vec<f64>, t: Vec<f64>, values: Vec<Vec<f64>> },
}

/// Gaussian spatial factors extend this many widths before they are dropped.
const GAUSS_CUTOFF: f64 = 9.0;

impl Load {
    pub fn zero() -> Self {
        Load::Gaussian { amplitude: 0.0, center: 0.0, width: 1.0, rise: 1.0 }
    }

    pub fn validate(&self) -> Result<(), ElasticError> {
        let bad = |m: &str| Err(ElasticError::InvalidLoad(m.to_string()));
        match self {
            Load::Gaussian { amplitude, width, rise, center } => {
                if !(width.is_finite() && *width > 0.0 && *rise > 0.0 && rise.is_finite() && amplitude.is_finite() && center.is_finite()) {
                    return bad("gaussian load needs finite amplitude and center, positive width and rise");
                }
            }
            Load::Pulse { amplitude, width, duration, center } => {
                if !(width.is_finite() && *width > 0.0 && *duration > 0.0 && duration.is_finite() && amplitude.is_finite() && center.is_finite()) {
                    return bad("pulse load needs finite amplitude and center, positive width and duration");
                }
            }
            Load::Table { y, t, values } => {
                if y.len() < 2 || t.len() < 2 {
                    return bad("table load needs at least two y and two t samples");
                }
                if !y.windows(2).all(|w| w[1] > w[0]) || !t.windows(2).all(|w| w[1] > w[0]) {
                    return bad("table axes must be strictly increasing");
                }
                if t[0] < 0.0 {
                    return bad("table times must be non-negative");
                }
                if values.len() != y.len() || values.iter().any(|row| row.len() != t.len()) {
                    return bad("table values must be y.len() rows of t.len() entries");
                }
                if values.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("table values must be finite");
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Load::Gaussian { amplitude, .. } | Load::Pulse { amplitude, .. } => *amplitude == 0.0,
            Load::Table { values, .. } => values.iter().flatten().all(|&v| v == 0.0),
        }
    }

    /// `Some((amplitude, center, width, envelope))` for the separable kinds.
    fn separable(&self) -> Option<(f64, f64, f64, TimeProfile)> {
        match *self {
            Load::Gaussian { amplitude, center, width, rise } => Some((amplitude, center, width, TimeProfile::Ramp { rise })),
            Load::Pulse { amplitude, center, width, duration } => Some((amplitude, center, width, TimeProfile::Pulse { duration })),
            Load::Table { .. } => None,
        }
    }

    pub fn eval(&self, y: f64, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if let Some((a, c, w, env)) = self.separable() {
            return a * (-((y - c) / w).powi(2)).exp() * env.eval(t);
        }
        let Load::Table { y: ys, t: ts, values } = self else { unreachable!() };
        if y < ys[0] || y > ys[ys.len() - 1] || t < ts[0] {
            return 0.0;
        }
        let t = t.min(ts[ts.len() - 1]);
        let (i, fy) = bracket(ys, y);
        let (j, ft) = bracket(ts, t);
        let v = |a: usize, b: usize| values[a][b];
        (1.0 - fy) * ((1.0 - ft) * v(i, j) + ft * v(i, j + 1)) + fy * ((1.0 - ft) * v(i + 1, j) + ft * v(i + 1, j + 1))
    }

    /// Interval outside which `p(·, t)` vanishes (or is below `e^{-81}` of its peak).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Load::Gaussian { center, width, .. } | Load::Pulse { center, width, .. } => {
                (center - GAUSS_CUTOFF * width, center + GAUSS_CUTOFF * width)
            }
            Load::Table { y, .. } => (y[0], y[y.len() - 1]),
        }
    }

    /// Spatial length scale: the Gaussian width or the table spacing.
    pub fn length_scale(&self) -> f64 {
        match self {
            Load::Gaussian { width, .. } | Load::Pulse { width, .. } => *width,
            Load::Table { y, .. } => y.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn time_scale(&self) -> f64 {
        match self.separable() {
            Some((.., env)) => env.time_scale(),
            None => {
                let Load::Table { t, .. } = self else { unreachable!() };
                t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// `max |p|` over space and time.
    pub fn peak(&self) -> f64 {
        match self {
            Load::Gaussian { amplitude, .. } | Load::Pulse { amplitude, .. } => amplitude.abs(),
            Load::Table { values, .. } => values.iter().flatten().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// `|ξ|` beyond which every `|p̄(ξ, t)|` is below `level · peak`.
    pub fn xi_cutoff(&self, level: f64) -> f64 {
        match self {
            Load::Gaussian { width, .. } | Load::Pulse { width, .. } => 2.0 * (1.0 / level).ln().sqrt() / width,
            // bilinear hat functions decay like 1/ξ²
            Load::Table { .. } => {
                let (a, b) = self.support();
                let h = self.length_scale();
                (((b - a) / h) / level).sqrt() * 2.0 / h
            }
        }
    }
}

fn bracket(xs: &[f64], x: f64) -> (usize, f64) {
    let i = xs.partition_point(|&v| v <= x).saturating_sub(1).min(xs.len() - 2);
    (i, ((x - xs[i]) / (xs[i + 1] - xs[i])).clamp(0.0, 1.0))
}

/// `p̄(ξ, t) = (1/√(2π)) ∫ p(y, t) e^{-iξy} dy` by panel quadrature over the support.
pub fn load_transform_y(p: &Load, xi: f64, t: f64) -> Result<C64, ElasticError> {
    let (a, b) = p.support();
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(ElasticError::UnresolvedSupport);
    }
    if p.is_zero() || t <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let period = if xi == 0.0 { f64::INFINITY } else { 2.0 * PI / xi.abs() };
    let width = (0.5 * p.length_scale()).min(0.5 * period);
    let breaks: Vec<f64> = match p {
        Load::Table { y, .. } => y.clone(),
        _ => Vec::new(),
    };
    let mut sum = C64::new(0.0, 0.0);
    for (pa, pb) in panels(a, b, &breaks, width) {
        for (y, w) in gl15().on(pa, pb) {
            sum += w * p.eval(y, t) * (-I * xi * y).exp();
        }
    }
    Ok(sum / (2.0 * PI).sqrt())
}

/// Closed-form image of the separable kinds: `A g(t) (w/√2) e^{-iξ y0 - ξ² w² / 4}`.
pub fn load_transform_exact(p: &Load, xi: f64, t: f64) -> Option<C64> {
    let (a, c, w, env) = p.separable()?;
    Some(a * env.eval(t) * w / 2f64.sqrt() * (-I * xi * c - xi * xi * w * w / 4.0).exp())
}

/// `p̄(ξ, ·)` sampled on `times`.
pub fn load_series(p: &Load, xi: f64, times: &[f64]) -> Result<Vec<C64>, ElasticError> {
    if let Some((a, c, w, env)) = p.separable() {
        let s = a * w / 2f64.sqrt() * (-I * xi * c - xi * xi * w * w / 4.0).exp();
        return Ok(times.iter().map(|&t| s * env.eval(t)).collect());
    }
    times.iter().map(|&t| load_transform_y(p, xi, t)).collect()
}

/// Kinks of the time dependence; the Duhamel grid places nodes there.
pub fn load_kinks(p: &Load) -> Vec<f64> {
    match p.separable() {
        Some((.., env)) => env.kinks(),
        None => {
            let Load::Table { t, .. } = p else { unreachable!() };
            t.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_matches_closed_form() {
        let p = Load::Gaussian { amplitude: 2.0, center: 0.3, width: 0.7, rise: 0.5 };
        for &xi in &[0.0, 0.5, 3.0, 10.0] {
            let q = load_transform_y(&p, xi, 1.0).unwrap();
            let e = load_transform_exact(&p, xi, 1.0).unwrap();
            assert!((q - e).norm() < 1e-8, "xi={xi}: {q} vs {e}");
        }
    }

    #[test]
    fn zero_and_even_loads() {
        assert_eq!(load_transform_y(&Load::zero(), 1.0, 1.0).unwrap(), C64::new(0.0, 0.0));
        let p = Load::Pulse { amplitude: 1.0, center: 0.0, width: 1.0, duration: 2.0 };
        let v = load_transform_y(&p, 1.3, 0.5).unwrap();
        assert!(v.im.abs() < 1e-14 * v.re.abs());
    }

    #[test]
    fn real_load_is_conjugate_symmetric() {
        let p = Load::Table { y: vec![-1.0, 0.0, 0.5, 2.0], t: vec![0.0, 1.0], values: vec![vec![0.0, 1.0], vec![0.0, 2.0], vec![0.0, -1.0], vec![0.0, 0.5]] };
        let a = load_transform_y(&p, 0.8, 0.7).unwrap();
        let b = load_transform_y(&p, -0.8, 0.7).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn table_interpolates() {
        let p = Load::Table { y: vec![0.0, 1.0], t: vec![0.0, 1.0], values: vec![vec![0.0, 2.0], vec![0.0, 4.0]] };
        assert!((p.eval(0.5, 0.5) - 1.5).abs() < 1e-15);
        assert_eq!(p.eval(1.5, 0.5), 0.0);
    }
}
