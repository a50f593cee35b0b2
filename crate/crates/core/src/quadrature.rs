//! Panel quadrature shared by the transforms, the Duhamel integral and the
//! kernel integrals.
//!
//! Integrals are split into panels whose width never exceeds a caller-chosen
//! limit (a fraction of the local oscillation period), each panel is
//! integrated with 15-point Gauss-Legendre, and panels are bisected until the
//! one-panel and two-half-panel estimates agree. Panel results are summed in
//! ascending order so results do not depend on evaluation order.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

use crate::linalg::C64;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 15-point rule.
pub fn gl15() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("panel budget of {max_panels} exhausted (error estimate {estimate:e})")]
    BudgetExceeded { max_panels: usize, estimate: f64 },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
}

/// Splits `[a, b]` at the given interior breakpoints and then into pieces no
/// wider than `max_width`.
pub fn panels(a: f64, b: f64, breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let pieces = if max_width.is_finite() && max_width > 0.0 {
            ((hi - lo) / max_width).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let p0 = lo + h * k as f64;
            let p1 = if k + 1 == pieces { hi } else { lo + h * (k + 1) as f64 };
            out.push((p0, p1));
        }
    }
    out
}

/// Fixed-panel Gauss-Legendre sum of a vector-valued integrand.
pub fn fixed_vec<F>(f: F, panel_list: &[(f64, f64)], dim: usize) -> Vec<C64>
where
    F: Fn(f64) -> Vec<C64>,
{
    let rule = gl15();
    let mut total = vec![C64::new(0.0, 0.0); dim];
    for &(a, b) in panel_list {
        for (x, w) in rule.on(a, b) {
            for (t, v) in total.iter_mut().zip(f(x)) {
                *t += v * w;
            }
        }
    }
    total
}

/// Settings for [`adaptive_vec`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSpec {
    /// Relative tolerance against the magnitude of the whole integral.
    pub rel_tol: f64,
    /// Absolute floor on the tolerance.
    pub abs_tol: f64,
    pub max_panels: usize,
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Vec<C64>,
    pub error_estimate: f64,
    pub panels: usize,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn panel_value<F: Fn(f64) -> Vec<C64>>(f: &F, a: f64, b: f64, dim: usize) -> Result<Vec<C64>, QuadratureError> {
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    for (x, w) in gl15().on(a, b) {
        let v = f(x);
        for (t, z) in acc.iter_mut().zip(v) {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(QuadratureError::NonFinite { at: x });
            }
            *t += z * w;
        }
    }
    Ok(acc)
}

/// Accepted panels of an adaptive bisection, left to right.
#[derive(Debug, Clone)]
pub struct Partition {
    pub panels: Vec<(f64, f64)>,
    pub value: Vec<C64>,
    pub error_estimate: f64,
}

/// Adaptive bisection over an initial panel list.
///
/// A panel is accepted when its value and the sum over its two halves differ
/// by at most its share (by width) of `max(rel_tol * |I|, abs_tol)`, where
/// `|I|` is the magnitude of the first-pass total.
pub fn adaptive_partition<F>(f: F, initial: &[(f64, f64)], dim: usize, spec: AdaptiveSpec) -> Result<Partition, QuadratureError>
where
    F: Fn(f64) -> Vec<C64>,
{
    if initial.is_empty() {
        return Ok(Partition { panels: Vec::new(), value: vec![C64::new(0.0, 0.0); dim], error_estimate: 0.0 });
    }
    let total_width: f64 = initial.iter().map(|(a, b)| b - a).sum();
    let first: Vec<Vec<C64>> = initial
        .iter()
        .map(|&(a, b)| panel_value(&f, a, b, dim))
        .collect::<Result<_, _>>()?;
    let mut scale_sum = vec![C64::new(0.0, 0.0); dim];
    for v in &first {
        for (s, z) in scale_sum.iter_mut().zip(v) {
            *s += z;
        }
    }
    let budget_tol = (spec.rel_tol * norm(&scale_sum)).max(spec.abs_tol);

    let mut total = vec![C64::new(0.0, 0.0); dim];
    let mut error = 0.0;
    let mut accepted = Vec::new();
    // explicit stack keeps left-to-right accumulation order
    let mut stack: Vec<(f64, f64, Vec<C64>)> = initial.iter().copied().zip(first).map(|((a, b), v)| (a, b, v)).rev().collect();
    while let Some((a, b, whole)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let left = panel_value(&f, a, mid, dim)?;
        let right = panel_value(&f, mid, b, dim)?;
        let halves: Vec<C64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let diff: Vec<C64> = halves.iter().zip(&whole).map(|(h, w)| h - w).collect();
        let est = norm(&diff);
        let allowed = budget_tol * (b - a) / total_width;
        if est <= allowed || (b - a) <= 1e-13 * total_width.max(1.0) {
            for (t, h) in total.iter_mut().zip(&halves) {
                *t += h;
            }
            error += est;
            accepted.push((a, mid));
            accepted.push((mid, b));
        } else {
            if 2 * (accepted.len() + stack.len() + 2) > spec.max_panels {
                return Err(QuadratureError::BudgetExceeded { max_panels: spec.max_panels, estimate: est });
            }
            stack.push((mid, b, right));
            stack.push((a, mid, left));
        }
    }
    Ok(Partition { panels: accepted, value: total, error_estimate: error })
}

pub fn adaptive_vec<F>(f: F, initial: &[(f64, f64)], dim: usize, spec: AdaptiveSpec) -> Result<QuadResult, QuadratureError>
where
    F: Fn(f64) -> Vec<C64>,
{
    let p = adaptive_partition(f, initial, dim, spec)?;
    Ok(QuadResult { value: p.value, error_estimate: p.error_estimate, panels: p.panels.len() })
}

/// Scalar convenience wrapper around [`adaptive_vec`].
pub fn adaptive_scalar<F>(f: F, initial: &[(f64, f64)], spec: AdaptiveSpec) -> Result<(C64, f64), QuadratureError>
where
    F: Fn(f64) -> C64,
{
    let r = adaptive_vec(|x| vec![f(x)], initial, 1, spec)?;
    Ok((r.value[0], r.error_estimate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl15_integrates_degree_29_exactly() {
        let rule = gl15();
        let s: f64 = rule.nodes().iter().zip(rule.weights()).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
        let wsum: f64 = rule.weights().iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn panels_respect_breaks_and_width() {
        let p = panels(0.0, 1.0, &[0.3], 0.25);
        assert!(p.iter().all(|(a, b)| b - a <= 0.25 + 1e-15));
        assert!(p.iter().any(|&(_, b)| (b - 0.3).abs() < 1e-15));
        assert_eq!(p.first().unwrap().0, 0.0);
        assert_eq!(p.last().unwrap().1, 1.0);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let spec = AdaptiveSpec { rel_tol: 1e-12, abs_tol: 1e-300, max_panels: 10_000 };
        let (v, _) = adaptive_scalar(|x| C64::new((50.0 * x).sin() * (-x).exp(), 0.0), &panels(0.0, 40.0, &[], 0.05), spec).unwrap();
        // int_0^40 sin(50x) e^{-x} dx = 50/(1+2500) (1 - e^{-40}(...))
        let exact = 50.0 / 2501.0 - (-40.0f64).exp() * ((2000.0f64).sin() + 50.0 * (2000.0f64).cos()) / 2501.0;
        assert!((v.re - exact).abs() < 1e-13);
    }

    #[test]
    fn adaptive_refines_kinks() {
        let spec = AdaptiveSpec { rel_tol: 1e-10, abs_tol: 1e-300, max_panels: 10_000 };
        let (v, _) = adaptive_scalar(|x| C64::new((x - 0.3137).abs(), 0.0), &panels(0.0, 1.0, &[], 1.0), spec).unwrap();
        let exact = 0.5 * (0.3137f64.powi(2) + 0.6863f64.powi(2));
        assert!((v.re - exact).abs() < 1e-9);
    }

    #[test]
    fn budget_is_reported() {
        let spec = AdaptiveSpec { rel_tol: 1e-14, abs_tol: 1e-300, max_panels: 4 };
        let r = adaptive_scalar(|x| C64::new((x - 0.3137).abs().sqrt(), 0.0), &panels(0.0, 1.0, &[], 1.0), spec);
        assert!(matches!(r, Err(QuadratureError::BudgetExceeded { .. })));
    }
}
