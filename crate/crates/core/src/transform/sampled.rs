//! A field sampled once on Gauss-Legendre panels fine enough for every
//! wavenumber up to a cap, so `∫ u*(ξ, λ) f(ξ) dξ` at any `λ` below the cap
//! reduces to the scalar sums `Σ w e^{±iκ_j s} (H f)_j`.

use std::collections::HashMap;

use crate::linalg::{CMatrix, C64, I};
use crate::quadrature::{adaptive_partition, gl15, panels, AdaptiveSpec, QuadratureError};
use crate::spectral::{DualRep, SpectralBasis};

use super::PiecewiseField;

struct SampledLayer {
    m: usize,
    widths: Vec<f64>,
    centers: Vec<f64>,
    width_idx: Vec<usize>,
    /// Weighted samples `w f(x)`, laid out as `[panel][node][component]`.
    values: Vec<C64>,
}

pub(super) struct SampledField {
    r: usize,
    layers: Vec<SampledLayer>,
    pub error_estimate: f64,
    pub nodes: usize,
}

/// Integration span of one layer: limits, breakpoints, feature scale.
pub(super) type Span = (f64, f64, Vec<f64>, f64);

impl SampledField {
    /// `kappa_max[m - 1]` bounds the wavenumbers of layer `m` at every `λ` to be served.
    pub fn new(
        f: &PiecewiseField,
        spans: &[Option<Span>],
        kappa_max: &[f64],
        panel_tol: f64,
        abs_tol: f64,
        max_panels: usize,
    ) -> Result<Self, QuadratureError> {
        let r = f.r();
        let rule = gl15();
        let mut layers = Vec::new();
        let mut error = 0.0;
        let mut nodes = 0;
        for (idx, span) in spans.iter().enumerate() {
            let Some((a, b, breaks, feature)) = span else { continue };
            let m = idx + 1;
            let kmax = kappa_max[idx].max(1e-300);
            let period = 2.0 * std::f64::consts::PI / kmax;
            let width = period.min(feature.max(1e-6)).min(b - a);
            let initial = panels(*a, *b, breaks, width);
            // resolve f itself and f against the fastest phase
            let probe = |x: f64| -> Vec<C64> {
                let v = f.eval_layer(m, x, 0);
                let e = (I * kmax * (x - a)).exp();
                let mut out = v.clone();
                out.extend(v.iter().map(|z| z * e));
                out
            };
            let spec = AdaptiveSpec { rel_tol: panel_tol, abs_tol, max_panels };
            let part = adaptive_partition(probe, &initial, 2 * r, spec)?;
            error += part.error_estimate;

            let mut width_key: HashMap<u64, usize> = HashMap::new();
            let mut widths = Vec::new();
            let mut centers = Vec::with_capacity(part.panels.len());
            let mut width_idx = Vec::with_capacity(part.panels.len());
            let mut values = Vec::with_capacity(part.panels.len() * rule.len() * r);
            for &(pa, pb) in &part.panels {
                let w = pb - pa;
                let wi = *width_key.entry(w.to_bits()).or_insert_with(|| {
                    widths.push(w);
                    widths.len() - 1
                });
                centers.push(0.5 * (pa + pb));
                width_idx.push(wi);
                for (x, wt) in rule.on(pa, pb) {
                    values.extend(f.eval_layer(m, x, 0).into_iter().map(|z| z * wt));
                }
            }
            nodes += values.len() / r.max(1);
            layers.push(SampledLayer { m, widths, centers, width_idx, values });
        }
        Ok(SampledField { r, layers, error_estimate: error, nodes })
    }

    /// `∫ u*(ξ, λ) f(ξ) dξ` over the sampled spans.
    pub fn integrate(&self, basis: &SpectralBasis) -> Vec<C64> {
        self.integrate_with(|m| basis.dual_layer(m))
    }

    /// `∫ D(ξ) f(ξ) dξ` for any row-structured kernel given per layer.
    pub fn integrate_with<'a>(&self, dual_of: impl Fn(usize) -> &'a DualRep) -> Vec<C64> {
        self.integrate_segments(dual_of, &[f64::NEG_INFINITY]).remove(0)
    }

    /// Integrals over the segments `[s_i, s_{i+1})`; panels must not straddle a station.
    pub fn integrate_segments<'a>(&self, dual_of: impl Fn(usize) -> &'a DualRep, stations: &[f64]) -> Vec<Vec<C64>> {
        let r = self.r;
        let rule = gl15();
        let nq = rule.len();
        let mut totals = vec![vec![C64::new(0.0, 0.0); r]; stations.len()];
        for layer in &self.layers {
            let dual = dual_of(layer.m);
            let kappa = &dual.kappa;
            let real = kappa.iter().all(|k| k.im == 0.0);
            // a vanishing G₋ (the tail of a decaying kernel) must not meet growing phases
            let no_minus = dual.g_minus.max_abs() == 0.0;
            let nw = layer.widths.len();
            // half-panel phases per (component, width, node), both signs
            let mut table = vec![C64::new(0.0, 0.0); r * nw * nq];
            let mut table_minus = vec![C64::new(0.0, 0.0); if real { 0 } else { r * nw * nq }];
            for j in 0..r {
                for (wi, w) in layer.widths.iter().enumerate() {
                    for (q, t) in rule.nodes().iter().enumerate() {
                        let idx = (j * nw + wi) * nq + q;
                        table[idx] = (I * kappa[j] * 0.5 * w * t).exp();
                        if !real && !no_minus {
                            table_minus[idx] = (-I * kappa[j] * 0.5 * w * t).exp();
                        }
                    }
                }
            }
            let h = dual.h.inner();
            let mut plus = vec![vec![C64::new(0.0, 0.0); r]; stations.len()];
            let mut minus = vec![vec![C64::new(0.0, 0.0); r]; stations.len()];
            let mut centre = vec![C64::new(0.0, 0.0); r];
            let mut centre_minus = vec![C64::new(0.0, 0.0); r];
            for (p, (&c, &wi)) in layer.centers.iter().zip(&layer.width_idx).enumerate() {
                let bin = stations.partition_point(|&s| s <= c).max(1) - 1;
                let (plus, minus) = (&mut plus[bin], &mut minus[bin]);
                for j in 0..r {
                    centre[j] = (I * kappa[j] * (c - dual.anchor)).exp();
                    if !real && !no_minus {
                        centre_minus[j] = (-I * kappa[j] * (c - dual.anchor)).exp();
                    }
                }
                for q in 0..nq {
                    let fv = &layer.values[(p * nq + q) * r..(p * nq + q + 1) * r];
                    for j in 0..r {
                        let mut hf = C64::new(0.0, 0.0);
                        for (l, z) in fv.iter().enumerate() {
                            hf += h[(j, l)] * z;
                        }
                        let idx = (j * nw + wi) * nq + q;
                        let e = centre[j] * table[idx];
                        let em = if real { e.conj() } else { centre_minus[j] * table_minus[idx] };
                        plus[j] += e * hf;
                        minus[j] += em * hf;
                    }
                }
            }
            let add = |m: &CMatrix, v: &[C64], total: &mut Vec<C64>| {
                for (t, z) in total.iter_mut().zip(m.mul_vec(v)) {
                    *t += z;
                }
            };
            for ((total, plus), minus) in totals.iter_mut().zip(&plus).zip(&minus) {
                if plus.iter().chain(minus).all(|z| z.norm() == 0.0) {
                    continue;
                }
                add(&dual.g_minus, minus, total);
                add(&dual.g_plus, plus, total);
            }
        }
        totals
    }
}
