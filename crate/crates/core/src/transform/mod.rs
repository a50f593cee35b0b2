//! Forward and inverse transforms with discontinuous coefficients.
//!
//! The forward image of a field is
//! `f̃(λ) = ∫ u*(ξ, λ) f(ξ) dξ + (γ⁰ f(l0) + δ⁰ f'(l0)) + Σ_k W_k(λ) J_k`
//! where `J_k` is the jump of `(γ_j f + δ_j f')` across `l_k` and
//! `W_k = (Φ̊, Ψ̊) Ω_k⁻¹(l_k) M_1k⁻¹`; the inverse is
//! `f(x) = -(1/(π i)) ∫ λ u(x, λ) f̃(λ) dλ` over the positive half-line.

mod contour;
mod field;
mod sampled;

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

pub use contour::{Contour, ResolventBasis, SegmentCoefficients, Stations};
pub use field::{conjugation_residual, random_conjugate_field, CubicSpline, DecayWitness, PiecewiseField, Profile, Term};

use crate::linalg::{vec_norm, CMatrix, C64, I};
use crate::medium::{assemble_m, CouplingSet, MediumStack, Side};
use crate::quadrature::{gl15, panels, QuadratureError};
use crate::spectral::{wavenumber, SpectralBasis, SpectralError};
use sampled::SampledField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("field tail is not resolved: {0}")]
    TailNotResolved(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("oscillation budget exceeded: {0}")]
    OscillationBudgetExceeded(String),
    #[error("the operational identity does not apply: conjugation residual {residual:e} exceeds 1e-6")]
    HypothesisViolated { residual: f64 },
    #[error("invalid quadrature settings: {0}")]
    BadSpec(String),
    #[error("x = {x} lies outside the range [l0, {reach}] resolved by this image")]
    OutsideResolvedRange { x: f64, reach: f64 },
}

impl From<QuadratureError> for TransformError {
    fn from(e: QuadratureError) -> Self {
        TransformError::OscillationBudgetExceeded(e.to_string())
    }
}

/// Truncation and tolerance settings for both transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub epsilon: f64,
    pub lambda_max: f64,
    /// Upper end of the `ξ` integral; derived from the decay witness when `None`.
    pub x_max: Option<f64>,
    pub panel_tol: f64,
    pub max_panels: usize,
    /// Angular panels of the contour around the spectrum below `λ₀²`; zero
    /// drops that part and starts the `λ` integral at `epsilon`.
    pub contour_panels: usize,
    /// Real point where the contour passes below every eigenvalue; derived
    /// from the medium when `None`.
    pub spectral_floor: Option<f64>,
    /// `λ₀`, where the `λ` integral takes over from the contour; derived from
    /// the floor when `None`.
    pub contour_split: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            epsilon: 1e-6,
            lambda_max: 200.0,
            x_max: None,
            panel_tol: 1e-10,
            max_panels: 200_000,
            contour_panels: 8,
            spectral_floor: None,
            contour_split: None,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), TransformError> {
        if !(self.epsilon > 0.0 && self.epsilon < self.lambda_max && self.lambda_max.is_finite()) {
            return Err(TransformError::BadSpec(format!("need 0 < epsilon < lambda_max, got {} and {}", self.epsilon, self.lambda_max)));
        }
        if !(self.panel_tol > 0.0 && self.panel_tol <= 1e-2) {
            return Err(TransformError::BadSpec(format!("panel_tol must lie in (0, 1e-2], got {}", self.panel_tol)));
        }
        if self.max_panels == 0 {
            return Err(TransformError::BadSpec("max_panels must be positive".into()));
        }
        if self.contour_panels == 1 {
            return Err(TransformError::BadSpec("contour_panels must be 0 or at least 2".into()));
        }
        if let Some(f) = self.spectral_floor {
            if !(f < 0.0 && f.is_finite()) {
                return Err(TransformError::BadSpec(format!("spectral_floor must be negative and finite, got {f}")));
            }
        }
        if let Some(l) = self.contour_split {
            if !(l > 0.0 && l < self.lambda_max) {
                return Err(TransformError::BadSpec(format!("contour_split must lie in (0, lambda_max), got {l}")));
            }
        }
        Ok(())
    }

    /// Contour around the spectrum below `λ₀²`, or `None` when disabled.
    pub fn contour(&self, medium: &MediumStack) -> Option<Contour> {
        if self.contour_panels == 0 {
            return None;
        }
        let floor = self.spectral_floor.unwrap_or_else(|| default_floor(medium));
        let split = self.contour_split.unwrap_or(0.5 * (-floor).sqrt()).max(self.epsilon);
        Some(Contour::circle(floor, split * split, self.contour_panels))
    }

    /// Lower end of the `λ` integral.
    pub fn lambda_min(&self, medium: &MediumStack) -> f64 {
        self.contour(medium).map_or(self.epsilon, |c| c.top.sqrt())
    }
}

/// `-(2 max Γ² + max A² / L²)` with `L` the stack depth (at least 1): below
/// every threshold and, for conditions without strongly attracting
/// boundary terms, below the eigenvalues.
pub fn default_floor(medium: &MediumStack) -> f64 {
    let top = |m: &CMatrix| crate::medium::symmetric_spectrum(m).map(|v| v.into_iter().fold(0.0, f64::max)).unwrap_or(0.0);
    let g = medium.layers().iter().map(|l| top(l.gamma_sq())).fold(0.0, f64::max);
    let a = medium.layers().iter().map(|l| top(l.a_sq())).fold(0.0, f64::max);
    let l = medium.interfaces();
    let depth = (l[l.len() - 1] - l[0]).max(1.0);
    -(2.0 * g + a / (depth * depth))
}

/// Relative tail level used when `x_max` is derived from the witness.
const TAIL_LEVEL: f64 = 1e-11;

/// Upper end of the `ξ` integral for `f`, and the bound of `∫_{x_max}^∞ ‖f‖`.
pub fn resolve_x_max(f: &PiecewiseField, quad: &QuadratureSpec) -> Result<(f64, f64), TransformError> {
    let ln = *f.interfaces().last().expect("l0");
    resolve_with_l1(f, quad, field_l1(f, ln), TAIL_LEVEL)
}

fn resolve_with_l1(f: &PiecewiseField, quad: &QuadratureSpec, l1: f64, level: f64) -> Result<(f64, f64), TransformError> {
    let ln = *f.interfaces().last().expect("l0");
    let w = f.witness();
    if !w.decays() {
        return Err(TransformError::TailNotResolved("decay witness has non-positive rate".into()));
    }
    let floor = level * l1.max(f64::MIN_POSITIVE);
    if let Some(x) = quad.x_max {
        let tail = w.tail_integral(x, ln);
        if !(tail <= quad.panel_tol * l1.max(f64::MIN_POSITIVE)) {
            return Err(TransformError::TailNotResolved(format!("neglected tail beyond x_max = {x} is bounded only by {tail:e}")));
        }
        return Ok((x, tail));
    }
    let mut x = w.support_end.max(ln);
    if w.tail_integral(x, ln) <= floor {
        return Ok((x, w.tail_integral(x, ln)));
    }
    let mut step = 0.5;
    for _ in 0..200 {
        x += step;
        step *= 1.25;
        let t = w.tail_integral(x, ln);
        if t <= floor {
            return Ok((x, t));
        }
    }
    Err(TransformError::TailNotResolved("witness decays too slowly".into()))
}

/// Rough `∫ ‖f‖` over `[l0, ln + 10]`, used only to scale tolerances.
fn field_l1(f: &PiecewiseField, ln: f64) -> f64 {
    let l0 = f.interfaces()[0];
    let hi = ln + 10.0;
    let n = 4000;
    let h = (hi - l0) / n as f64;
    (0..n).map(|i| vec_norm(&f.eval(l0 + (i as f64 + 0.5) * h)) * h).sum::<f64>()
}

/// Forward value at one `λ` with its error budget.
#[derive(Debug, Clone)]
pub struct ForwardValue {
    pub value: Vec<C64>,
    pub quadrature_error: f64,
    pub tail_bound: f64,
}

/// Precomputed per-field data shared across `λ` nodes.
struct FieldPlan {
    tail_l1: f64,
    l1: f64,
    /// Where the field's mass drops below `EXTENT_LEVEL` of its total.
    extent: f64,
    samples: SampledField,
}

/// Relative tail level beyond which far mass is ignored when sizing `λ` panels.
const EXTENT_LEVEL: f64 = 1e-8;

/// Where the field's mass falls below `EXTENT_LEVEL`, capped by `x_max`.
fn field_extent(f: &PiecewiseField, quad: &QuadratureSpec, l1: f64, x_max: f64) -> Result<f64, TransformError> {
    Ok(resolve_with_l1(f, &QuadratureSpec { x_max: None, ..*quad }, l1, EXTENT_LEVEL)?.0.min(x_max))
}

/// `kappa_max[m - 1]` must bound the wavenumbers of layer `m` at every `λ`
/// served; `stations` become extra panel breaks.
fn plan_field(f: &PiecewiseField, medium: &MediumStack, quad: &QuadratureSpec, kappa_max: &[f64], stations: &[f64]) -> Result<FieldPlan, TransformError> {
    let l = medium.interfaces();
    let ln = *l.last().expect("l0");
    let l1 = field_l1(f, ln);
    let (x_max, tail_l1) = resolve_with_l1(f, quad, l1, TAIL_LEVEL)?;
    let extent = field_extent(f, quad, l1, x_max)?;
    let layers = medium.layer_count();
    let mut spans = Vec::with_capacity(layers);
    let mut extent_all = l[0];
    for m in 1..=layers {
        let lo = l[m - 1];
        let hi = if m == layers { x_max } else { l[m] };
        let Some((slo, shi)) = f.layer_support(m) else {
            spans.push(None);
            continue;
        };
        let a = lo.max(slo);
        let b = hi.min(shi);
        if !(b > a) {
            spans.push(None);
            continue;
        }
        extent_all = extent_all.max(if m == layers { b.min(extent.max(ln)) } else { b });
        let mut breaks = f.breaks(m);
        breaks.extend(stations.iter().copied().filter(|&s| s > a && s < b));
        breaks.sort_by(f64::total_cmp);
        spans.push(Some((a, b, breaks, f.feature_scale(m))));
    }
    let abs_tol = 1e-14 * l1.max(f64::MIN_POSITIVE);
    let samples = SampledField::new(f, &spans, kappa_max, quad.panel_tol, abs_tol, quad.max_panels)?;
    Ok(FieldPlan { tail_l1, l1, extent: extent_all, samples })
}

/// Largest wavenumber of each layer at `λ`.
fn kappa_caps(medium: &MediumStack, lambda: f64) -> Result<Vec<f64>, TransformError> {
    (1..=medium.layer_count()).map(|m| Ok(wavenumber(medium, m, lambda)?.max_kappa())).collect()
}

fn forward_with_plan(
    f: &PiecewiseField,
    plan: &FieldPlan,
    basis: &SpectralBasis,
    medium: &MediumStack,
    coupling: &CouplingSet,
) -> Result<ForwardValue, TransformError> {
    let r = medium.r();
    let lambda = basis.lambda;
    let mut total = plan.samples.integrate(basis);
    let envelope = (1..=medium.layer_count()).map(|m| basis.dual_layer(m).envelope()).fold(0.0, f64::max);
    let qerr = plan.samples.error_estimate * envelope;
    let tail_bound = basis.dual_layer(medium.layer_count()).envelope() * plan.tail_l1;

    if !coupling.spectral_terms_vanish() {
        let l0 = medium.l0();
        let bc = &coupling.boundary;
        let f0 = f.eval_layer(1, l0, 0);
        let f1 = f.eval_layer(1, l0, 1);
        for ((t, a), b) in total.iter_mut().zip(bc.gamma.mul_vec(&f0)).zip(bc.delta.mul_vec(&f1)) {
            *t += a + b;
        }
        let images = CMatrix::hstack(&basis.phi0, &basis.psi0);
        for k in 1..=medium.n() {
            let ic = coupling.interface(k);
            let jump_side = |side: Side| -> Vec<C64> {
                let v = f.limit(k, side, 0);
                let d = f.limit(k, side, 1);
                let mut out = Vec::with_capacity(2 * r);
                for j in 1..=2 {
                    let q = ic.quad(j, side);
                    out.extend(q.gamma.mul_vec(&v).into_iter().zip(q.delta.mul_vec(&d)).map(|(a, b)| a + b));
                }
                out
            };
            let right = jump_side(Side::Right);
            let left = jump_side(Side::Left);
            let jump: Vec<C64> = right.iter().zip(&left).map(|(a, b)| a - b).collect();
            if jump.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let lk = medium.interfaces()[k];
            let omega_inv = basis.omega(k, lk).inverse().map_err(|_| SpectralError::SingularWronskian { layer: k, lambda })?;
            let m1_inv = assemble_m(coupling, Side::Left, k, lambda)
                .inverse()
                .map_err(|_| SpectralError::SingularInterface { interface: k, lambda })?;
            let weights = &(&images * &omega_inv) * &m1_inv;
            for (t, v) in total.iter_mut().zip(weights.mul_vec(&jump)) {
                *t += v;
            }
        }
    }
    Ok(ForwardValue { value: total, quadrature_error: qerr, tail_bound })
}

fn check_tail(v: &ForwardValue, plan: &FieldPlan, env: f64, quad: &QuadratureSpec) -> Result<(), TransformError> {
    let allowed = quad.panel_tol * vec_norm(&v.value) + 1e-10 * env * plan.l1;
    if v.tail_bound > allowed {
        return Err(TransformError::TailNotResolved(format!("tail bound {:e} exceeds {:e}", v.tail_bound, allowed)));
    }
    Ok(())
}

/// `f̃(λ)` at a single spectral parameter.
pub fn forward(f: &PiecewiseField, lambda: f64, medium: &MediumStack, coupling: &CouplingSet, quad: &QuadratureSpec) -> Result<ForwardValue, TransformError> {
    quad.validate()?;
    let basis = SpectralBasis::build(medium, coupling, lambda)?;
    let plan = plan_field(f, medium, quad, &kappa_caps(medium, lambda)?, &[])?;
    let v = forward_with_plan(f, &plan, &basis, medium, coupling)?;
    check_tail(&v, &plan, basis.dual_layer(medium.layer_count()).envelope(), quad)?;
    Ok(v)
}

/// Sampled forward image on the inversion grid.
#[derive(Debug, Clone)]
pub struct TransformImage {
    pub r: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Vec<C64>>,
    pub panels: Vec<(f64, f64)>,
    /// Largest `x` whose oscillation the panel layout resolves.
    pub x_reach: f64,
    /// Nodes dropped because the basis was singular there.
    pub skipped: usize,
    pub max_quadrature_error: f64,
    /// The part of the spectrum below `λ₀²`.
    pub low: Option<LowImage>,
}

/// Resolvent coefficients of a field at the nodes of the low contour.
#[derive(Debug, Clone)]
pub struct LowImage {
    pub contour: Contour,
    pub stations: Stations,
    pub coefficients: Vec<SegmentCoefficients>,
}

impl TransformImage {
    /// CSV with columns `lambda, re_1, im_1, ..., re_r, im_r`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let mut header = vec!["lambda".to_string()];
        for i in 1..=self.r {
            header.push(format!("re_{i}"));
            header.push(format!("im_{i}"));
        }
        writeln!(out, "{}", header.join(","))?;
        for (lambda, v) in self.nodes.iter().zip(&self.values) {
            let mut row = vec![format!("{lambda:.17e}")];
            for z in v {
                row.push(format!("{:.17e}", z.re));
                row.push(format!("{:.17e}", z.im));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Panel width in `λ` so each panel spans at most a quarter period of every
/// phase `κ (x - a)` with `x` up to `reach`, including two-way interlayer paths.
fn lambda_panel_width(medium: &MediumStack, reach: f64) -> f64 {
    let l = medium.interfaces();
    let depth = 2.0 * (l[l.len() - 1] - l[0]) + (reach - l[0]).max(0.0);
    let rate = medium.max_slowness() * depth;
    0.25 * 2.0 * std::f64::consts::PI / rate.max(1e-3)
}

/// Gauss-Legendre nodes of the `λ` integral over `[λ₀, λ_max]`.
#[derive(Debug, Clone)]
pub struct LambdaGrid {
    pub panels: Vec<(f64, f64)>,
    /// `(λ, weight)` pairs.
    pub nodes: Vec<(f64, f64)>,
    /// Nodes dropped because the basis was singular there.
    pub skipped: usize,
}

/// Gauss-Legendre nodes and weights in `λ`, resolving phases `κ (x - l0)`
/// up to `reach`. Panels whose nodes hit a singular basis are bisected;
/// after six levels the offending nodes are dropped.
pub fn lambda_grid(medium: &MediumStack, coupling: &CouplingSet, quad: &QuadratureSpec, reach: f64) -> Result<LambdaGrid, TransformError> {
    let width = lambda_panel_width(medium, reach);
    let initial = panels(quad.lambda_min(medium), quad.lambda_max, &[], width);
    if initial.len() > quad.max_panels {
        return Err(TransformError::OscillationBudgetExceeded(format!("{} lambda panels needed, budget {}", initial.len(), quad.max_panels)));
    }
    type PanelNodes = Vec<(f64, f64, Option<SpectralError>)>;
    let build = |(a, b): (f64, f64)| -> PanelNodes {
        gl15().on(a, b).map(|(x, w)| (x, w, SpectralBasis::build(medium, coupling, x).err())).collect()
    };
    let first: Vec<PanelNodes> = initial.par_iter().map(|&p| build(p)).collect();
    let mut accepted_panels = Vec::new();
    let mut nodes = Vec::new();
    let mut skipped = 0;
    let mut stack: Vec<((f64, f64), PanelNodes, u32)> = initial.into_iter().zip(first).map(|(p, n)| (p, n, 0)).rev().collect();
    while let Some(((a, b), pn, depth)) = stack.pop() {
        if pn.iter().all(|(_, _, e)| e.is_none()) || depth >= 6 {
            for (x, w, e) in pn {
                match e {
                    None => nodes.push((x, w)),
                    Some(e) => {
                        log::warn!("dropping lambda node {x}: {e}");
                        skipped += 1;
                    }
                }
            }
            accepted_panels.push((a, b));
        } else {
            let mid = 0.5 * (a + b);
            if accepted_panels.len() + stack.len() + 2 > quad.max_panels {
                return Err(TransformError::OscillationBudgetExceeded("singular-node subdivision exhausted the panel budget".into()));
            }
            stack.push(((mid, b), build((mid, b)), depth + 1));
            stack.push(((a, mid), build((a, mid)), depth + 1));
        }
    }
    Ok(LambdaGrid { panels: accepted_panels, nodes, skipped })
}

/// Computes `f̃` on an inversion grid that resolves `[l0, reach]` and the
/// field's own extent.
pub fn forward_image(
    f: &PiecewiseField,
    medium: &MediumStack,
    coupling: &CouplingSet,
    quad: &QuadratureSpec,
    reach: f64,
) -> Result<TransformImage, TransformError> {
    quad.validate()?;
    let l = medium.interfaces();
    let ln = *l.last().expect("l0");
    let l1 = field_l1(f, ln);
    let (x_max, _) = resolve_with_l1(f, quad, l1, TAIL_LEVEL)?;
    let reach = reach.max(field_extent(f, quad, l1, x_max)?.max(ln));
    let contour = quad.contour(medium);
    let stations = contour.as_ref().map(|c| Stations::new(l, reach, station_spacing(medium, c)));
    let plan = plan_field(f, medium, quad, &kappa_caps(medium, quad.lambda_max)?, stations.as_ref().map_or(&[][..], |s| &s.points[..]))?;
    let reach = reach.max(plan.extent);
    let LambdaGrid { panels: panel_list, nodes: grid, skipped } = lambda_grid(medium, coupling, quad, reach)?;
    log::debug!("forward image: {} lambda nodes, {} field samples, reach {reach}", grid.len(), plan.samples.nodes);
    let results: Vec<Result<ForwardValue, TransformError>> = grid
        .par_iter()
        .map(|&(lambda, _)| {
            let basis = SpectralBasis::build(medium, coupling, lambda)?;
            let v = forward_with_plan(f, &plan, &basis, medium, coupling)?;
            check_tail(&v, &plan, basis.dual_layer(medium.layer_count()).envelope(), quad)?;
            Ok(v)
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    let mut max_err: f64 = 0.0;
    for r in results {
        let v = r?;
        max_err = max_err.max(v.quadrature_error);
        values.push(v.value);
    }
    let low = match (contour, stations) {
        (Some(contour), Some(stations)) => {
            let coefficients = contour
                .nodes
                .par_iter()
                .map(|&mu| {
                    let rb = ResolventBasis::build(medium, coupling, mu)?;
                    let rv = plan.samples.integrate_segments(|m| rb.regular_density(m), &stations.points);
                    let bv = plan.samples.integrate_segments(|m| rb.bounded_density(m), &stations.points);
                    Ok(rb.coefficients(f, &stations, &rv, &bv, medium, coupling))
                })
                .collect::<Result<Vec<_>, SpectralError>>()?;
            Some(LowImage { contour, stations, coefficients })
        }
        _ => None,
    };
    Ok(TransformImage {
        r: medium.r(),
        nodes: grid.iter().map(|g| g.0).collect(),
        weights: grid.iter().map(|g| g.1).collect(),
        values,
        panels: panel_list,
        x_reach: reach,
        skipped,
        max_quadrature_error: max_err,
        low,
    })
}

/// Station gap over which the fastest evanescent growth on the contour stays below `e^{1.5}`.
fn station_spacing(medium: &MediumStack, contour: &Contour) -> f64 {
    let mu = contour.floor.abs().max(contour.top);
    1.5 / (mu.sqrt() * medium.max_slowness()).max(1e-12)
}

/// `(1/(2π i)) ∮ y(x, μ) dμ` over the low contour at each `x`.
fn low_contribution(low: &LowImage, xs: &[f64], medium: &MediumStack, coupling: &CouplingSet) -> Result<Vec<Vec<C64>>, TransformError> {
    let r = medium.r();
    let parts = low
        .contour
        .nodes
        .par_iter()
        .zip(&low.contour.weights)
        .zip(&low.coefficients)
        .map(|((&mu, &w), co)| {
            let rb = ResolventBasis::build(medium, coupling, mu)?;
            Ok(xs.iter().map(|&x| rb.eval(x, &low.stations, co).into_iter().map(|z| z * w).collect::<Vec<_>>()).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    let mut out = vec![vec![C64::new(0.0, 0.0); r]; xs.len()];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            for (a, b) in o.iter_mut().zip(v) {
                *a += b;
            }
        }
    }
    Ok(out)
}

/// Inverse transform at several points.
#[derive(Debug, Clone)]
pub struct InverseValues {
    pub values: Vec<Vec<C64>>,
    /// Norm of the contribution from `[λ_max / 2, λ_max]`, per point: a proxy
    /// for the neglected tail beyond `λ_max`.
    pub truncation: Vec<f64>,
}

/// `F⁻¹[f̃](x) = -(1/(π i)) ∫ λ u(x, λ) f̃(λ) dλ` at each `x`.
pub fn inverse_many(image: &TransformImage, xs: &[f64], medium: &MediumStack, coupling: &CouplingSet) -> Result<InverseValues, TransformError> {
    let l0 = medium.l0();
    for &x in xs {
        if x < l0 || x > image.x_reach * (1.0 + 1e-12) {
            return Err(TransformError::OutsideResolvedRange { x, reach: image.x_reach });
        }
    }
    let r = image.r;
    let lambda_max = image.panels.last().map_or(0.0, |p| p.1);
    let prefactor = -1.0 / (std::f64::consts::PI * I);
    // per-node contributions in parallel, summed in ascending node order
    let chunk = 64;
    let node_idx: Vec<usize> = (0..image.nodes.len()).collect();
    type Partial = (Vec<Vec<C64>>, Vec<Vec<C64>>);
    let partials: Vec<Result<Partial, TransformError>> = node_idx
        .par_chunks(chunk)
        .map(|ids| {
            let mut acc = vec![vec![C64::new(0.0, 0.0); r]; xs.len()];
            let mut tail = vec![vec![C64::new(0.0, 0.0); r]; xs.len()];
            for &i in ids {
                let lambda = image.nodes[i];
                if image.values[i].iter().all(|z| z.norm() == 0.0) {
                    continue;
                }
                let basis = SpectralBasis::build(medium, coupling, lambda)?;
                let w = image.weights[i] * lambda;
                for (j, &x) in xs.iter().enumerate() {
                    let contrib = basis.spectral_u(x).mul_vec(&image.values[i]);
                    for (a, c) in acc[j].iter_mut().zip(&contrib) {
                        *a += c * w;
                    }
                    if lambda >= 0.5 * lambda_max {
                        for (a, c) in tail[j].iter_mut().zip(&contrib) {
                            *a += c * w;
                        }
                    }
                }
            }
            Ok((acc, tail))
        })
        .collect();
    let mut values = vec![vec![C64::new(0.0, 0.0); r]; xs.len()];
    let mut tails = vec![vec![C64::new(0.0, 0.0); r]; xs.len()];
    for p in partials {
        let (acc, tail) = p?;
        for j in 0..xs.len() {
            for i in 0..r {
                values[j][i] += acc[j][i];
                tails[j][i] += tail[j][i];
            }
        }
    }
    for v in values.iter_mut().chain(tails.iter_mut()) {
        for z in v.iter_mut() {
            *z *= prefactor;
        }
    }
    if let Some(low) = &image.low {
        for (v, lo) in values.iter_mut().zip(low_contribution(low, xs, medium, coupling)?) {
            for (a, b) in v.iter_mut().zip(lo) {
                *a += b;
            }
        }
    }
    Ok(InverseValues { values, truncation: tails.iter().map(|t| vec_norm(t)).collect() })
}

pub fn inverse(image: &TransformImage, x: f64, medium: &MediumStack, coupling: &CouplingSet) -> Result<Vec<C64>, TransformError> {
    Ok(inverse_many(image, &[x], medium, coupling)?.values.remove(0))
}

/// Right-hand side of the operational identity for `B f = A² f'' + Γ² f`:
/// `-λ² f̃ - {(β⁰ f + α⁰ f') - (γ⁰ (B f) + δ⁰ (B f)')}` at `l0`.
pub fn operator_image(
    f: &PiecewiseField,
    lambda: f64,
    medium: &MediumStack,
    coupling: &CouplingSet,
    quad: &QuadratureSpec,
) -> Result<Vec<C64>, TransformError> {
    let residual = conjugation_residual(f, medium, coupling);
    if residual > 1e-6 {
        return Err(TransformError::HypothesisViolated { residual });
    }
    let ft = forward(f, lambda, medium, coupling, quad)?;
    Ok(operator_rhs(f, &ft.value, lambda, medium, coupling))
}

/// The identity's right-hand side from a known `f̃(λ)`.
pub fn operator_rhs(f: &PiecewiseField, ft: &[C64], lambda: f64, medium: &MediumStack, coupling: &CouplingSet) -> Vec<C64> {
    let l0 = medium.l0();
    let layer = medium.layer(1);
    let bc = &coupling.boundary;
    let j: Vec<Vec<C64>> = (0..4).map(|n| f.eval_layer(1, l0, n)).collect();
    let add = |a: Vec<C64>, b: Vec<C64>| -> Vec<C64> { a.into_iter().zip(b).map(|(x, y)| x + y).collect() };
    let bf = add(layer.a_sq().mul_vec(&j[2]), layer.gamma_sq().mul_vec(&j[0]));
    let bf1 = add(layer.a_sq().mul_vec(&j[3]), layer.gamma_sq().mul_vec(&j[1]));
    let first = add(bc.beta.mul_vec(&j[0]), bc.alpha.mul_vec(&j[1]));
    let second = add(bc.gamma.mul_vec(&bf), bc.delta.mul_vec(&bf1));
    (0..medium.r()).map(|i| -lambda * lambda * ft[i] - (first[i] - second[i])).collect()
}

/// Outcome of `F⁻¹[F[f]]` on sample points.
#[derive(Debug, Clone)]
pub struct RoundTripReport {
    pub xs: Vec<f64>,
    pub original: Vec<Vec<C64>>,
    pub reconstructed: Vec<Vec<C64>>,
    pub max_abs_error: f64,
    /// `max_abs_error / max ‖f‖` over the samples.
    pub max_rel_error: f64,
    pub truncation: f64,
    pub image_nodes: usize,
}

pub fn decompose_roundtrip(
    f: &PiecewiseField,
    xs: &[f64],
    medium: &MediumStack,
    coupling: &CouplingSet,
    quad: &QuadratureSpec,
) -> Result<RoundTripReport, TransformError> {
    let reach = xs.iter().copied().fold(medium.l0(), f64::max);
    let image = forward_image(f, medium, coupling, quad, reach)?;
    let inv = inverse_many(&image, xs, medium, coupling)?;
    let original: Vec<Vec<C64>> = xs.iter().map(|&x| f.eval(x)).collect();
    let scale = original.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    let max_abs = original
        .iter()
        .zip(&inv.values)
        .map(|(a, b)| vec_norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    Ok(RoundTripReport {
        xs: xs.to_vec(),
        original,
        reconstructed: inv.values,
        max_abs_error: max_abs,
        max_rel_error: if scale > 0.0 { max_abs / scale } else { max_abs },
        truncation: inv.truncation.iter().copied().fold(0.0, f64::max),
        image_nodes: image.nodes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::medium::dirichlet_boundary;

    fn dirichlet(r: usize) -> (MediumStack, CouplingSet) {
        let m = MediumStack::new(r, vec![0.0], vec![(CMatrix::identity(r), CMatrix::zeros(r, r))]).unwrap();
        (m, CouplingSet::new(r, dirichlet_boundary(r), vec![]).unwrap())
    }

    fn exp_field(m: &MediumStack, k: usize) -> PiecewiseField {
        let v = vec![c(1.0, 0.0); m.r()];
        PiecewiseField::uniform(m, vec![Term::new(v, Profile::exp_monomial(0.0, k, 1.0))])
    }

    #[test]
    fn dirichlet_forward_matches_closed_form() {
        let (m, cpl) = dirichlet(2);
        let f = exp_field(&m, 0);
        for &lambda in &[0.1, 1.0, 3.0, 20.0] {
            let v = forward(&f, lambda, &m, &cpl, &QuadratureSpec::default()).unwrap();
            for z in &v.value {
                assert!((z - c(1.0 / (1.0 + lambda * lambda), 0.0)).norm() < 1e-8, "lambda={lambda}: {z}");
            }
        }
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let (m, cpl) = dirichlet(2);
        let f = PiecewiseField::zero(&m);
        let v = forward(&f, 2.0, &m, &cpl, &QuadratureSpec::default()).unwrap();
        assert!(v.value.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn dirichlet_round_trip() {
        let (m, cpl) = dirichlet(1);
        let f = exp_field(&m, 1);
        let quad = QuadratureSpec { lambda_max: 200.0, ..Default::default() };
        let rep = decompose_roundtrip(&f, &[0.5, 1.0, 2.0], &m, &cpl, &quad).unwrap();
        assert!(rep.max_rel_error < 1e-3, "{rep:?}");
    }

    #[test]
    fn inverse_of_zero_image() {
        let (m, cpl) = dirichlet(1);
        let image = TransformImage { r: 1, nodes: vec![1.0], weights: vec![1.0], values: vec![vec![c(0.0, 0.0)]], panels: vec![(0.5, 1.5)], x_reach: 5.0, skipped: 0, max_quadrature_error: 0.0, low: None };
        assert_eq!(inverse(&image, 1.0, &m, &cpl).unwrap(), vec![c(0.0, 0.0)]);
    }

    #[test]
    fn growing_field_is_rejected() {
        let (m, cpl) = dirichlet(1);
        let f = PiecewiseField::uniform(&m, vec![Term::new(vec![c(1.0, 0.0)], Profile::exp_monomial(0.0, 0, -0.2))]);
        assert!(matches!(forward(&f, 1.0, &m, &cpl, &QuadratureSpec::default()), Err(TransformError::TailNotResolved(_))));
    }

    #[test]
    fn dirichlet_operational_identity() {
        let (m, cpl) = dirichlet(1);
        let f = exp_field(&m, 0);
        let bf = f.apply_b(&m);
        let quad = QuadratureSpec::default();
        for &lambda in &[0.5, 2.0, 7.0] {
            let lhs = forward(&bf, lambda, &m, &cpl, &quad).unwrap().value;
            let rhs = operator_image(&f, lambda, &m, &cpl, &quad).unwrap();
            assert!((lhs[0] - rhs[0]).norm() < 1e-6 * (1.0 + lambda * lambda));
        }
    }

    #[test]
    fn csv_columns() {
        let image = TransformImage { r: 2, nodes: vec![1.0], weights: vec![1.0], values: vec![vec![c(1.0, 2.0), c(3.0, 4.0)]], panels: vec![], x_reach: 1.0, skipped: 0, max_quadrature_error: 0.0, low: None };
        let mut buf = Vec::new();
        image.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lambda,re_1,im_1,re_2,im_2\n"));
    }
}
