//! `∫₀ᵗ sin(ω (t - τ)) / ω · g(τ) dτ` for forcings `g` made of pieces
//! `c0 + s (τ - a) + c1 cos(ν (τ - a))`.
//!
//! Every kernel is written through `sinc` and `(z - sin z) / z³`, which are
//! entire in `ω²`, so complex `ω` and the limit `ω → 0` need no special case.

use crate::linalg::C64;
use crate::quadrature::gl15;

use super::load::{load_series, Load, TimeProfile};
use super::ElasticError;

/// One analytic piece on `[a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub c0: C64,
    pub slope: C64,
    pub c1: C64,
    pub nu: f64,
}

impl Piece {
    fn eval(&self, tau: f64) -> C64 {
        let s = tau - self.a;
        self.c0 + self.slope * s + self.c1 * (self.nu * s).cos()
    }
}

/// Time dependence of `p̄(ξ, ·)`, zero before the first piece.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Forcing {
    pub pieces: Vec<Piece>,
}

impl Forcing {
    /// Piecewise-linear interpolation of samples, held constant after the last one.
    pub fn linear(times: &[f64], values: &[C64]) -> Self {
        assert_eq!(times.len(), values.len());
        let mut pieces = Vec::with_capacity(times.len());
        let zero = C64::new(0.0, 0.0);
        for (w, v) in times.windows(2).zip(values.windows(2)) {
            let slope = (v[1] - v[0]) / (w[1] - w[0]);
            pieces.push(Piece { a: w[0], b: w[1], c0: v[0], slope, c1: zero, nu: 0.0 });
        }
        if let (Some(&t), Some(&v)) = (times.last(), values.last()) {
            pieces.push(Piece { a: t, b: f64::INFINITY, c0: v, slope: zero, c1: zero, nu: 0.0 });
        }
        Forcing { pieces }
    }

    /// `p̄(ξ, ·)`: exact pieces for the separable loads, the table's own
    /// linear segments otherwise.
    pub fn from_load(p: &Load, xi: f64) -> Result<Self, ElasticError> {
        let zero = C64::new(0.0, 0.0);
        match *p {
            Load::Gaussian { rise, .. } | Load::Pulse { duration: rise, .. } => {
                let s = load_series(p, xi, &[f64::INFINITY])?;
                let env = match *p {
                    Load::Gaussian { .. } => TimeProfile::Ramp { rise },
                    _ => TimeProfile::Pulse { duration: rise },
                };
                // spatial factor at a time where the envelope equals one
                let scale = match env {
                    TimeProfile::Ramp { .. } => s[0],
                    TimeProfile::Pulse { duration } => load_series(p, xi, &[0.5 * duration])?[0],
                };
                let half = scale * 0.5;
                let mut pieces = Vec::new();
                match env {
                    TimeProfile::Ramp { rise } => {
                        pieces.push(Piece { a: 0.0, b: rise, c0: half, slope: zero, c1: -half, nu: std::f64::consts::PI / rise });
                        pieces.push(Piece { a: rise, b: f64::INFINITY, c0: scale, slope: zero, c1: zero, nu: 0.0 });
                    }
                    TimeProfile::Pulse { duration } => {
                        pieces.push(Piece { a: 0.0, b: duration, c0: half, slope: zero, c1: -half, nu: 2.0 * std::f64::consts::PI / duration });
                    }
                }
                Ok(Forcing { pieces })
            }
            Load::Table { ref t, .. } => {
                let v = load_series(p, xi, t)?;
                Ok(Forcing::linear(t, &v))
            }
        }
    }

    pub fn value(&self, t: f64) -> C64 {
        self.pieces.iter().find(|p| t >= p.a && t < p.b).map_or(C64::new(0.0, 0.0), |p| p.eval(t))
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.c0.norm() == 0.0 && p.slope.norm() == 0.0 && p.c1.norm() == 0.0)
    }

    /// Points where the forcing or one of its derivatives jumps.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.pieces.iter().flat_map(|p| [p.a, p.b]).filter(|t| t.is_finite()).collect();
        k.dedup();
        k
    }
}

/// `sin z / z`.
pub(crate) fn sinc(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let z2 = z * z;
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..8 {
            term *= -z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        z.sin() / z
    }
}

/// `(z - sin z) / z³`.
fn cubic_remainder(z: C64) -> C64 {
    if z.norm() < 1.0 {
        let z2 = z * z;
        let mut term = C64::new(1.0 / 6.0, 0.0);
        let mut sum = term;
        for k in 1..10 {
            term *= -z2 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
            sum += term;
        }
        sum
    } else {
        (z - z.sin()) / (z * z * z)
    }
}

/// `∫₀ˢ sin(ω σ)/ω dσ = (1 - cos ωs)/ω²`.
fn k1(omega: C64, s: f64) -> C64 {
    let h = sinc(omega * (0.5 * s));
    0.5 * s * s * h * h
}

/// `∫₀ˢ k1 = (s - sin(ωs)/ω)/ω²`.
fn k2(omega: C64, s: f64) -> C64 {
    s * s * s * cubic_remainder(omega * s)
}

/// Phase span `|ω| d` below which a piece is integrated by Gauss-Legendre.
const QUADRATURE_SPAN: f64 = 20.0;

fn piece_by_quadrature(p: &Piece, omega: C64, t: f64, hi: f64) -> C64 {
    let d = hi - p.a;
    let phase = (omega.norm() + p.nu) * d;
    let n = (phase / 3.0).ceil().max(1.0) as usize;
    let h = d / n as f64;
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..n {
        for (tau, w) in gl15().on(p.a + i as f64 * h, p.a + (i + 1) as f64 * h) {
            let s = t - tau;
            sum += w * s * sinc(omega * s) * p.eval(tau);
        }
    }
    sum
}

fn piece_closed_form(p: &Piece, omega: C64, t: f64, hi: f64) -> C64 {
    let (sa, sb) = (t - p.a, t - hi);
    let d = hi - p.a;
    let mut out = p.c0 * (k1(omega, sa) - k1(omega, sb));
    if p.slope.norm() != 0.0 {
        out += p.slope * (k2(omega, sa) - k2(omega, sb) - d * k1(omega, sb));
    }
    if p.c1.norm() != 0.0 {
        // cos(ν(τ - a)) in the local variable, midpoint m of [0, d]
        let m = 0.5 * d;
        let tl = t - p.a;
        let nu = p.nu;
        let term = |k: C64, shift: f64| (omega * (tl - m) + shift).sin() * (0.5 * d) * sinc(k * (0.5 * d));
        out += p.c1 * (term(omega - nu, nu * m) + term(omega + nu, -nu * m)) / omega;
    }
    out
}

/// `∫₀ᵗ sin(ω (t - τ)) / ω · g(τ) dτ` for any complex `ω²`.
pub fn duhamel_kernel(omega_sq: C64, t: f64, forcing: &Forcing) -> C64 {
    let omega = omega_sq.sqrt();
    let mut sum = C64::new(0.0, 0.0);
    for p in &forcing.pieces {
        if t <= p.a {
            continue;
        }
        let hi = p.b.min(t);
        let d = hi - p.a;
        // near ω = ±ν the closed form of the cosine part cancels
        let resonant = p.c1.norm() != 0.0 && (omega.norm() < 2.0 * p.nu || omega.norm() * d <= QUADRATURE_SPAN);
        sum += if resonant {
            piece_by_quadrature(p, omega, t, hi)
        } else {
            piece_closed_form(p, omega, t, hi)
        };
    }
    sum
}

/// `(φ̃, ψ̃)(η, ξ, t)` for the forcing `[p̄; 0]` with `ω = √(c²ξ² + η²)`.
pub fn duhamel(c: f64, xi: f64, eta: f64, t: f64, forcing: &Forcing) -> [C64; 2] {
    let omega_sq = C64::new(c * c * xi * xi + eta * eta, 0.0);
    [duhamel_kernel(omega_sq, t, forcing), C64::new(0.0, 0.0)]
}
