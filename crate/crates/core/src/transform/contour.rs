//! The part of the spectrum below `λ₀²`.
//!
//! When `Γ²` does not vanish in the tail the continuous spectrum of `-B`
//! starts below zero, and isolated eigenvalues may sit further down. That
//! part of the expansion is written as a contour integral of the resolvent
//! `y(μ)`, solving `(B + μ) y = f` with the conditions carrying the data
//! `γ f + δ f'`, around a closed curve that crosses the real axis at `λ₀²`
//! and below every eigenvalue:
//!
//! `f_low(x) = (1/(2π i)) ∮ y(x, μ) dμ`.
//!
//! With `Y_b` the solutions meeting the boundary condition and `Y_∞` the
//! bounded ones, `y = Y_b(x) a(x) + Y_∞(x) b(x)` by variation of
//! parameters. Freezing the coefficients at a station `s ≤ x` of the same
//! layer leaves a remainder marched from `s` inside one layer, which is
//! entire in `μ` and integrates to zero. The image of `f` at a contour node
//! is the list of pairs `(a(s⁺), b(s⁺))` over the stations. Stations include
//! every interface and are spaced so that `Y_b` cannot grow much between
//! neighbours.

use nalgebra::DMatrix;

use crate::linalg::{block_solve, CMatrix, C64, I};
use crate::medium::{assemble_m_mu, assemble_spectral_part, CouplingSet, MediumStack, Side};
use crate::quadrature::gl15;
use crate::spectral::{wavenumber_mu, DualRep, LayerExpRep, SpectralError};

use super::PiecewiseField;

/// Regular and bounded solution families at one complex `μ`.
#[derive(Debug, Clone)]
pub struct ResolventBasis {
    pub mu: C64,
    /// `Y_b` per layer: `r` columns meeting the homogeneous boundary condition.
    pub regular: Vec<LayerExpRep>,
    /// `Y_∞` per layer: `r` columns bounded as `x → ∞`.
    pub bounded: Vec<LayerExpRep>,
    /// Boundary operator applied to `Y_∞` at `l0`.
    pub image: CMatrix,
    image_inv: CMatrix,
    /// Top rows of `Ω⁻¹ [0; A⁻² ·]`, the density of the `Y_b` coefficient.
    dual_regular: Vec<DualRep>,
    /// Bottom rows, the density of the `Y_∞` coefficient.
    dual_bounded: Vec<DualRep>,
    /// Per interface: `Ω_{k+1}(l_k)⁻¹ M_2k⁻¹`, mapping data to the coefficient jump.
    jump_weights: Vec<CMatrix>,
    interfaces: Vec<f64>,
}

fn singular(what: impl Into<String>, mu: C64) -> SpectralError {
    SpectralError::SingularAtMu { what: what.into(), mu }
}

/// Orthonormal basis of the null space of the `r × 2r` matrix `n`, as a
/// `2r × r` block.
fn null_space(n: &CMatrix, mu: C64) -> Result<CMatrix, SpectralError> {
    let r = n.nrows();
    let mut padded = DMatrix::<C64>::zeros(2 * r, 2 * r);
    padded.view_mut((0, 0), (r, 2 * r)).copy_from(n.inner());
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| singular("boundary condition", mu))?;
    let mut order: Vec<usize> = (0..2 * r).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let top = svd.singular_values[order[2 * r - 1]];
    if svd.singular_values[order[r]] <= 1e-12 * top {
        return Err(singular("boundary condition (rank deficient)", mu));
    }
    Ok(CMatrix::from_fn(2 * r, r, |i, j| v_t[(order[j], i)].conj()))
}

impl ResolventBasis {
    pub fn build(medium: &MediumStack, coupling: &CouplingSet, mu: C64) -> Result<Self, SpectralError> {
        let r = medium.r();
        let layers = medium.layer_count();
        let l = medium.interfaces();
        let waves = (1..=layers).map(|m| wavenumber_mu(medium, m, mu)).collect::<Result<Vec<_>, _>>()?;

        // bounded family, marched down from the tail
        let tail = &waves[layers - 1];
        let ln = l[medium.n()];
        let p_hat = tail.v_inv.scale_rows(&tail.diag(|k| (I * k * ln).exp()));
        let mut bounded = vec![LayerExpRep { wave: tail.clone(), anchor: ln, p_hat, q_hat: CMatrix::zeros(r, r) }];
        for k in (1..layers).rev() {
            let m1 = assemble_m_mu(coupling, Side::Left, k, mu);
            let m2 = assemble_m_mu(coupling, Side::Right, k, mu);
            let jet = block_solve(&m1, &(&m2 * &bounded.last().expect("tail").jet(l[k])))
                .map_err(|_| singular(format!("interface {k}"), mu))?;
            let wave = waves[k - 1].clone();
            bounded.push(LayerExpRep::from_jet(wave, medium.anchor(k), l[k], &jet.block(0, 0, r, r), &jet.block(r, 0, r, r)));
        }
        bounded.reverse();

        let (bv, bd) = coupling.boundary.at_mu(mu);
        let l0 = l[0];
        let image = &(&bv * &bounded[0].eval(l0)) + &(&bd * &bounded[0].derivative(l0, 1));
        let image_inv = image.inverse().map_err(|_| singular("boundary image", mu))?;

        // regular family, marched up from the boundary
        let start = null_space(&CMatrix::hstack(&bv, &bd), mu)?;
        let mut regular = vec![LayerExpRep::from_jet(waves[0].clone(), medium.anchor(1), l0, &start.block(0, 0, r, r), &start.block(r, 0, r, r))];
        let mut jump_weights = Vec::with_capacity(medium.n());
        for k in 1..layers {
            let m1 = assemble_m_mu(coupling, Side::Left, k, mu);
            let m2 = assemble_m_mu(coupling, Side::Right, k, mu);
            let m2_inv = m2.inverse().map_err(|_| singular(format!("interface {k}"), mu))?;
            let jet = &m2_inv * &(&m1 * &regular.last().expect("layer").jet(l[k]));
            let next = LayerExpRep::from_jet(waves[k].clone(), medium.anchor(k + 1), l[k], &jet.block(0, 0, r, r), &jet.block(r, 0, r, r));
            let omega = CMatrix::hstack(&jet, &bounded[k].jet(l[k]));
            let omega_inv = omega.inverse().map_err(|_| singular(format!("Wronskian at interface {k}"), mu))?;
            jump_weights.push(&omega_inv * &m2_inv);
            regular.push(next);
        }

        let mut dual_regular = Vec::with_capacity(layers);
        let mut dual_bounded = Vec::with_capacity(layers);
        for m in 1..=layers {
            let (b, inf) = (&regular[m - 1], &bounded[m - 1]);
            let a_inv = medium.layer(m).a_inv();
            let h = (&b.wave.v_inv * &(a_inv * a_inv)).scale_rows(&b.wave.diag(|k| 1.0 / (2.0 * I * k)));
            let kernel = |g_minus: CMatrix, g_plus: CMatrix| DualRep { kappa: b.wave.kappa.clone(), anchor: b.anchor, g_minus, g_plus, h: h.clone() };
            if m == layers {
                // the bounded columns carry no growing part: C = [[P_b, P_∞], [Q_b, 0]]
                let q_inv = b.q_hat.inverse().map_err(|_| singular("tail Wronskian", mu))?;
                let p_inv = inf.p_hat.inverse().map_err(|_| singular("tail Wronskian", mu))?;
                dual_regular.push(kernel(CMatrix::zeros(r, r), -&q_inv));
                dual_bounded.push(kernel(p_inv.clone(), &(&p_inv * &b.p_hat) * &q_inv));
            } else {
                let c = CMatrix::from_blocks(&b.p_hat, &inf.p_hat, &b.q_hat, &inf.q_hat);
                let c_inv = c.inverse().map_err(|_| singular(format!("layer {m} Wronskian"), mu))?;
                dual_regular.push(kernel(c_inv.block(0, 0, r, r), -c_inv.block(0, r, r, r)));
                dual_bounded.push(kernel(c_inv.block(r, 0, r, r), -c_inv.block(r, r, r, r)));
            }
        }
        Ok(ResolventBasis { mu, regular, bounded, image, image_inv, dual_regular, dual_bounded, jump_weights, interfaces: l.to_vec() })
    }

    fn layer_of(&self, x: f64) -> usize {
        let n = self.interfaces.len() - 1;
        (1..=n).find(|&k| x <= self.interfaces[k]).unwrap_or(n + 1)
    }

    /// Density of the `Y_b` coefficient on layer `m`.
    pub fn regular_density(&self, m: usize) -> &DualRep {
        &self.dual_regular[m - 1]
    }

    /// Density of the `Y_∞` coefficient on layer `m`.
    pub fn bounded_density(&self, m: usize) -> &DualRep {
        &self.dual_bounded[m - 1]
    }

    /// `Φ̊(μ)⁻¹`.
    pub fn image_inverse(&self) -> &CMatrix {
        &self.image_inv
    }

    /// `Y_b(x) a + Y_∞(x) b` with the coefficients of the segment holding `x`.
    pub fn eval(&self, x: f64, stations: &Stations, coeffs: &SegmentCoefficients) -> Vec<C64> {
        let m = self.layer_of(x);
        let i = stations.segment_of(x);
        let yb = self.regular[m - 1].eval(x).mul_vec(&coeffs.regular[i]);
        let yi = self.bounded[m - 1].eval(x).mul_vec(&coeffs.bounded[i]);
        yb.into_iter().zip(yi).map(|(p, q)| p + q).collect()
    }

    /// `Y_∞(x) Φ̊⁻¹ b0`: the resolvent of a source-free problem driven by
    /// boundary data alone.
    pub fn boundary_response(&self, x: f64, b0: &[C64]) -> Vec<C64> {
        self.boundary_response_in(self.layer_of(x), x, b0)
    }

    /// The same with the representation of layer `m`, for one-sided limits at interfaces.
    pub fn boundary_response_in(&self, m: usize, x: f64, b0: &[C64]) -> Vec<C64> {
        self.bounded[m - 1].eval(x).mul_vec(&self.image_inv.mul_vec(b0))
    }

    /// Coefficients of `f` from its volume integrals over each segment,
    /// `∫ D_b f` and `∫ D_∞ f`.
    pub fn coefficients(
        &self,
        f: &PiecewiseField,
        stations: &Stations,
        regular_volume: &[Vec<C64>],
        bounded_volume: &[Vec<C64>],
        medium: &MediumStack,
        coupling: &CouplingSet,
    ) -> SegmentCoefficients {
        let r = medium.r();
        let segments = stations.points.len();
        let zero = || vec![C64::new(0.0, 0.0); r];
        let add = |t: &mut Vec<C64>, v: &[C64], s: f64| {
            for (a, b) in t.iter_mut().zip(v) {
                *a += b * s;
            }
        };
        // coefficient jump Ω⁻¹ M₂⁻¹ d_k across each interface, keyed by station
        let mut jumps: Vec<Option<Vec<C64>>> = vec![None; segments];
        for k in 1..=medium.n() {
            let jet = |side: Side| -> Vec<C64> {
                let mut v = f.limit(k, side, 0);
                v.extend(f.limit(k, side, 1));
                v
            };
            let left = assemble_spectral_part(coupling, Side::Left, k).mul_vec(&jet(Side::Left));
            let right = assemble_spectral_part(coupling, Side::Right, k).mul_vec(&jet(Side::Right));
            let d: Vec<C64> = left.iter().zip(&right).map(|(p, q)| p - q).collect();
            if d.iter().any(|z| z.norm() != 0.0) {
                jumps[stations.interface_station[k - 1]] = Some(self.jump_weights[k - 1].mul_vec(&d));
            }
        }
        let l0 = medium.l0();
        let bc = &coupling.boundary;
        let b0: Vec<C64> = bc
            .gamma
            .mul_vec(&f.eval_layer(1, l0, 0))
            .into_iter()
            .zip(bc.delta.mul_vec(&f.eval_layer(1, l0, 1)))
            .map(|(p, q)| p + q)
            .collect();
        let e = if b0.iter().all(|z| z.norm() == 0.0) { zero() } else { self.image_inv.mul_vec(&b0) };

        let mut regular = vec![zero(); segments];
        let mut acc = zero();
        for i in (0..segments).rev() {
            add(&mut acc, &regular_volume[i], -1.0);
            if let Some(j) = jumps.get(i + 1).and_then(|j| j.as_ref()) {
                add(&mut acc, &j[..r], 1.0);
            }
            regular[i] = acc.clone();
        }
        let mut bounded = vec![zero(); segments];
        let mut acc = e;
        for i in 0..segments {
            if i > 0 {
                add(&mut acc, &bounded_volume[i - 1], 1.0);
            }
            if let Some(j) = &jumps[i] {
                add(&mut acc, &j[r..], -1.0);
            }
            bounded[i] = acc.clone();
        }
        SegmentCoefficients { regular, bounded }
    }
}

/// Points `l0 = s_0 < s_1 < …` at which resolvent coefficients are frozen.
/// Segment `i` is `[s_i, s_{i+1})`, the last one unbounded; every interface
/// is a station.
#[derive(Debug, Clone, PartialEq)]
pub struct Stations {
    pub points: Vec<f64>,
    /// Station index of interface `l_k`, `k = 1..n`.
    pub interface_station: Vec<usize>,
}

impl Stations {
    /// Interfaces plus enough points on `[l0, reach]` that no gap exceeds `spacing`.
    pub fn new(interfaces: &[f64], reach: f64, spacing: f64) -> Self {
        let mut points = vec![interfaces[0]];
        let mut interface_station = Vec::with_capacity(interfaces.len() - 1);
        let fill = |points: &mut Vec<f64>, to: f64| {
            let from = *points.last().expect("l0");
            let n = ((to - from) / spacing).ceil().max(1.0) as usize;
            for i in 1..n {
                points.push(from + (to - from) * i as f64 / n as f64);
            }
        };
        for &lk in &interfaces[1..] {
            fill(&mut points, lk);
            points.push(lk);
            interface_station.push(points.len() - 1);
        }
        let last = *points.last().expect("l0");
        if reach > last {
            fill(&mut points, reach);
        }
        Stations { points, interface_station }
    }

    /// Segment holding `x`; a point on an interface belongs to the segment on its left.
    pub fn segment_of(&self, x: f64) -> usize {
        let mut i = self.points.partition_point(|&s| s <= x).max(1) - 1;
        if i > 0 && self.points[i] == x && self.interface_station.contains(&i) {
            i -= 1;
        }
        i
    }
}

/// `(a(s_i⁺), b(s_i⁺))` for every segment at one contour node.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCoefficients {
    pub regular: Vec<Vec<C64>>,
    pub bounded: Vec<Vec<C64>>,
}

/// Nodes `μ_i` and weights `w_i` of `(1/(2π i)) ∮ g(μ) dμ ≈ Σ w_i g(μ_i)` on the
/// circle through `floor` and `top`, traversed counter-clockwise from `top`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub floor: f64,
    pub top: f64,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl Contour {
    /// `panels` Gauss-Legendre panels in the angle, graded towards both
    /// crossings of the real axis.
    pub fn circle(floor: f64, top: f64, panels: usize) -> Self {
        assert!(floor < top && panels >= 2);
        let centre = 0.5 * (floor + top);
        let radius = 0.5 * (top - floor);
        let rule = gl15();
        let pi = std::f64::consts::PI;
        // half the panels per half circle, geometric towards the axis
        let half = panels.div_ceil(2);
        let mut edges = vec![0.0];
        let grade = |t: f64| 0.5 * pi * (1.0 - (pi * t).cos());
        for i in 1..=half {
            edges.push(grade(i as f64 / half as f64));
        }
        let upper: Vec<f64> = edges.clone();
        let mut all = upper.clone();
        all.extend(upper.iter().skip(1).map(|t| pi + t));
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in all.windows(2) {
            for (t, wt) in rule.on(w[0], w[1]) {
                let e = C64::from_polar(1.0, t);
                nodes.push(centre + radius * e);
                // dμ / (2π i) = R e^{iθ} dθ / (2π)
                weights.push(radius * e * wt / (2.0 * pi));
            }
        }
        Contour { floor, top, nodes, weights }
    }
}
