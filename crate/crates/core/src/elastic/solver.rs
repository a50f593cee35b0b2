//! Tension functions by the composed inversion: Duhamel images in `(ξ, η)`,
//! the transform with discontinuous coefficients inverted in `η` at each `x`,
//! then the classical inverse in `ξ`.
//!
//! At fixed `ξ` the images are `D(ω, t) [1; 0]` with `ω² = c²ξ² + μ` and
//! `μ = η²`, the response to boundary data alone. The inversion in `μ` runs
//! over three parts:
//!
//! - the `λ` integral over `[λ₀, λ_max]`;
//! - the contour around the spectrum below `λ₀²`;
//! - a quasi-static term. `D ≈ p̄(t)/ω²` for large `ω` converges slowly, so
//!   `p̄(t)/(μ + ν)` is subtracted from `D` everywhere and restored through
//!   its residue at `μ = -ν`, outside the contour.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{c, C64, I};
use crate::medium::{CouplingSet, MediumStack};
use crate::quadrature::gl15;
use crate::spectral::SpectralBasis;
use crate::transform::{lambda_grid, QuadratureSpec, ResolventBasis};

use super::duhamel::{duhamel_kernel, Forcing};
use super::{ElasticError, ElasticScenario, Load};

/// Sampling grid of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
}

/// Quadrature controls of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    /// Settings of the inversion in `η` at each `ξ`; `spectral_floor` and
    /// `contour_split` are overridden per `ξ`.
    pub transform: QuadratureSpec,
    /// `ξ` integration stops where `|p̄|` falls below this fraction of its peak.
    pub xi_level: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec { transform: QuadratureSpec { lambda_max: 100.0, ..Default::default() }, xi_level: 1e-9 }
    }
}

/// A sample column: layer index and depth. An interface inside the grid
/// appears once for each adjacent layer.
pub type Column = (usize, f64);

/// Columns for the `x` nodes of a grid.
pub fn columns(scenario: &ElasticScenario, xs: &[f64]) -> Vec<Column> {
    let l = scenario.interfaces();
    let mut out = Vec::with_capacity(xs.len() + l.len());
    for &x in xs {
        let m = scenario.layer_of(x);
        out.push((m, x));
        if m < scenario.layers().len() && x == l[m] {
            out.push((m + 1, x));
        }
    }
    out
}

/// `(φ̄, ψ̄)(x, ξ, t)` at each time and column.
#[derive(Debug, Clone)]
pub struct Slice {
    pub xi: f64,
    /// `values[t][column]`.
    pub values: Vec<Vec<[C64; 2]>>,
    /// Norm of the `λ ≥ λ_max / 2` contribution, a proxy for the `λ` tail.
    pub lambda_tail: f64,
    pub lambda_nodes: usize,
    pub skipped: usize,
}

/// Real point of the contour below the spectrum at `ξ`. The interface
/// conditions degenerate at `ω = 0`, that is `μ = -c²ξ²`, and a pole sits
/// close by; the floor keeps a margin below it.
pub fn contour_floor(scenario: &ElasticScenario, xi: f64) -> f64 {
    let c = scenario.c();
    let l = scenario.interfaces();
    let depth = (l[l.len() - 1] - l[0]).max(1.0);
    -(1.2 * c * c * xi * xi + 0.1 * c * c / (depth * depth))
}

fn slice_quadrature(scenario: &ElasticScenario, xi: f64, spec: &SolverSpec) -> QuadratureSpec {
    let floor = contour_floor(scenario, xi);
    QuadratureSpec { spectral_floor: Some(floor), contour_split: None, ..spec.transform }
}

/// `(φ̄, ψ̄)` at one `ξ` for every column and time.
pub fn spectral_slice(scenario: &ElasticScenario, xi: f64, cols: &[Column], ts: &[f64], spec: &SolverSpec) -> Result<Slice, ElasticError> {
    let forcing = Forcing::from_load(&scenario.load, xi)?;
    let zero = [C64::new(0.0, 0.0); 2];
    if forcing.is_zero() {
        return Ok(Slice { xi, values: vec![vec![zero; cols.len()]; ts.len()], lambda_tail: 0.0, lambda_nodes: 0, skipped: 0 });
    }
    let (medium, coupling) = scenario.build_coupling(xi)?;
    slice_with(scenario, &medium, &coupling, &forcing, xi, cols, ts, spec)
}

#[allow(clippy::too_many_arguments)]
fn slice_with(
    scenario: &ElasticScenario,
    medium: &MediumStack,
    coupling: &CouplingSet,
    forcing: &Forcing,
    xi: f64,
    cols: &[Column],
    ts: &[f64],
    spec: &SolverSpec,
) -> Result<Slice, ElasticError> {
    let quad = slice_quadrature(scenario, xi, spec);
    let c2xi2 = scenario.c().powi(2) * xi * xi;
    let floor = quad.spectral_floor.expect("set per slice");
    let nu = -2.0 * floor;
    let statics: Vec<C64> = ts.iter().map(|&t| forcing.value(t)).collect();
    let remainder = |mu: C64, ti: usize| duhamel_kernel(mu + c2xi2, ts[ti], forcing) - statics[ti] / (mu + nu);
    let e1 = [c(1.0, 0.0), c(0.0, 0.0)];

    let t_max = ts.iter().copied().fold(0.0, f64::max);
    let x_max = cols.iter().map(|c| c.1).fold(medium.l0(), f64::max);
    let reach = x_max + t_max / medium.max_slowness().max(1e-12);
    let grid = lambda_grid(medium, coupling, &quad, reach)?;
    let lambda_max = grid.panels.last().map_or(0.0, |p| p.1);

    let mut values = vec![vec![[C64::new(0.0, 0.0); 2]; cols.len()]; ts.len()];
    let mut tail = vec![vec![[C64::new(0.0, 0.0); 2]; cols.len()]; ts.len()];
    let prefactor = -1.0 / (PI * I);
    for &(lambda, w) in &grid.nodes {
        let basis = SpectralBasis::build(medium, coupling, lambda)?;
        let mu = c(lambda * lambda, 0.0);
        let weights: Vec<C64> = (0..ts.len()).map(|ti| prefactor * lambda * w * remainder(mu, ti)).collect();
        for (ci, &(m, x)) in cols.iter().enumerate() {
            let u = basis.u_layer(m).eval(x).mul_vec(&e1);
            for (ti, wt) in weights.iter().enumerate() {
                for k in 0..2 {
                    values[ti][ci][k] += wt * u[k];
                    if lambda >= 0.5 * lambda_max {
                        tail[ti][ci][k] += wt * u[k];
                    }
                }
            }
        }
    }

    if let Some(contour) = quad.contour(medium) {
        for (&mu, &w) in contour.nodes.iter().zip(&contour.weights) {
            let rb = ResolventBasis::build(medium, coupling, mu)?;
            let weights: Vec<C64> = (0..ts.len()).map(|ti| w * remainder(mu, ti)).collect();
            for (ci, &(m, x)) in cols.iter().enumerate() {
                let y = rb.boundary_response_in(m, x, &e1);
                for (ti, wt) in weights.iter().enumerate() {
                    for k in 0..2 {
                        values[ti][ci][k] += wt * y[k];
                    }
                }
            }
        }
    }

    // residue of p̄(t) y(μ) / (μ + ν) at μ = -ν
    let rb = ResolventBasis::build(medium, coupling, c(-nu, 0.0))?;
    for (ci, &(m, x)) in cols.iter().enumerate() {
        let y = rb.boundary_response_in(m, x, &e1);
        for (ti, s) in statics.iter().enumerate() {
            for k in 0..2 {
                values[ti][ci][k] -= s * y[k];
            }
        }
    }

    let lambda_tail = tail.iter().flatten().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(Slice { xi, values, lambda_tail, lambda_nodes: grid.nodes.len(), skipped: grid.skipped })
}

/// Gauss-Legendre nodes on `[0, ξ_c]`, one panel per period of the fastest
/// phase in `ξ`.
fn xi_nodes(scenario: &ElasticScenario, grid: &GridSpec, spec: &SolverSpec) -> Vec<(f64, f64)> {
    let load = &scenario.load;
    let xi_c = load.xi_cutoff(spec.xi_level);
    // separable images carry the phase of the load centre only
    let (a, b) = load.support();
    let spread = if matches!(load, Load::Table { .. }) { 0.5 * (b - a) } else { 0.0 };
    let y_reach = grid.y.iter().map(|&y| (y - 0.5 * (a + b)).abs()).fold(0.0, f64::max) + spread;
    let t_max = grid.t.iter().copied().fold(0.0, f64::max);
    let l0 = scenario.interfaces()[0];
    let x_span = grid.x.iter().map(|&x| x - l0).fold(0.0, f64::max);
    let rate = y_reach + scenario.c() * t_max + x_span;
    let n = ((xi_c * rate / (2.0 * PI)).ceil() as usize).max(4);
    let h = xi_c / n as f64;
    (0..n).flat_map(|i| gl15().on(i as f64 * h, (i + 1) as f64 * h).collect::<Vec<_>>()).collect()
}

/// Truncation and consistency figures of a tension reconstruction.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TensionReport {
    pub xi_nodes: usize,
    pub xi_cutoff: f64,
    /// Largest `λ`-tail proxy over all slices, scaled like the fields.
    pub lambda_truncation: f64,
    /// Relative level of the load image left out beyond `ξ_c`.
    pub xi_truncation: f64,
    pub max_lambda_nodes: usize,
    pub skipped_nodes: usize,
    /// `max |ȳ(-ξ) - conj ȳ(ξ)|` over probe slices, relative to the slice scale.
    pub imaginary_residue: f64,
}

/// `φ_i`, `ψ_i` on a grid.
#[derive(Debug, Clone)]
pub struct TensionGrid {
    pub grid: GridSpec,
    pub columns: Vec<Column>,
    /// `phi[t][column][y]`.
    pub phi: Vec<Vec<Vec<f64>>>,
    pub psi: Vec<Vec<Vec<f64>>>,
    pub report: TensionReport,
}

impl TensionGrid {
    /// `max |φ|, |ψ|` over the grid.
    pub fn peak(&self) -> f64 {
        self.phi.iter().chain(&self.psi).flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Pair of tension values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionPair {
    pub phi: f64,
    pub psi: f64,
}

/// `φ, ψ` on `grid.x × grid.y × grid.t` with the `ξ` inversion done by
/// conjugate symmetry, `(1/√(2π)) ∫ ȳ e^{iξy} dξ = (2/√(2π)) Re ∫₀^∞ ȳ e^{iξy} dξ`.
pub fn reconstruct_tension(scenario: &ElasticScenario, grid: &GridSpec, spec: &SolverSpec) -> Result<TensionGrid, ElasticError> {
    spec.transform.validate()?;
    let cols = columns(scenario, &grid.x);
    for &t in &grid.t {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ElasticError::InvalidGrid(format!("times must be finite and non-negative, got {t}")));
        }
    }
    if let Some(&x) = grid.x.iter().find(|&&x| x < scenario.interfaces()[0] || !x.is_finite()) {
        return Err(ElasticError::InvalidGrid(format!("x = {x} lies outside the body")));
    }
    let ncols = cols.len();
    let zero_grid = || vec![vec![vec![0.0; grid.y.len()]; ncols]; grid.t.len()];
    if scenario.load.is_zero() {
        return Ok(TensionGrid { grid: grid.clone(), columns: cols, phi: zero_grid(), psi: zero_grid(), report: TensionReport::default() });
    }
    let nodes = xi_nodes(scenario, grid, spec);
    log::debug!("tension: {} xi nodes, {} columns, {} times", nodes.len(), cols.len(), grid.t.len());
    let slices = nodes
        .par_iter()
        .map(|&(xi, _)| spectral_slice(scenario, xi, &cols, &grid.t, spec))
        .collect::<Result<Vec<_>, _>>()?;

    let mut phi = zero_grid();
    let mut psi = zero_grid();
    let norm = 2.0 / (2.0 * PI).sqrt();
    for (slice, &(xi, w)) in slices.iter().zip(&nodes) {
        let phases: Vec<C64> = grid.y.iter().map(|&y| (I * xi * y).exp() * w * norm).collect();
        for ti in 0..grid.t.len() {
            for ci in 0..cols.len() {
                let [a, b] = slice.values[ti][ci];
                for (yi, e) in phases.iter().enumerate() {
                    phi[ti][ci][yi] += (a * e).re;
                    psi[ti][ci][yi] += (b * e).re;
                }
            }
        }
    }

    let xi_c = nodes.last().map_or(0.0, |n| n.0);
    let mut report = TensionReport {
        xi_nodes: nodes.len(),
        xi_cutoff: scenario.load.xi_cutoff(spec.xi_level),
        lambda_truncation: slices.iter().zip(&nodes).map(|(s, n)| s.lambda_tail * n.1).sum::<f64>() * norm,
        xi_truncation: spec.xi_level,
        max_lambda_nodes: slices.iter().map(|s| s.lambda_nodes).max().unwrap_or(0),
        skipped_nodes: slices.iter().map(|s| s.skipped).sum(),
        imaginary_residue: 0.0,
    };
    report.imaginary_residue = reality_probe(scenario, &cols, &grid.t, spec, &[0.1 * xi_c, 0.4 * xi_c])?;
    Ok(TensionGrid { grid: grid.clone(), columns: cols, phi, psi, report })
}

/// Relative size of `ȳ(-ξ) - conj ȳ(ξ)` at a few `ξ`; it vanishes for a
/// real field, and bounds the imaginary part the symmetric inversion drops.
pub fn reality_probe(scenario: &ElasticScenario, cols: &[Column], ts: &[f64], spec: &SolverSpec, xis: &[f64]) -> Result<f64, ElasticError> {
    let mut worst: f64 = 0.0;
    for &xi in xis {
        let plus = spectral_slice(scenario, xi, cols, ts, spec)?;
        let minus = spectral_slice(scenario, -xi, cols, ts, spec)?;
        let scale = plus.values.iter().flatten().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        let diff = plus
            .values
            .iter()
            .flatten()
            .flatten()
            .zip(minus.values.iter().flatten().flatten())
            .map(|(p, m)| (m - p.conj()).norm())
            .fold(0.0, f64::max);
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

/// `(φ, ψ)(x, y, t)` at a single point.
pub fn tension_at(scenario: &ElasticScenario, x: f64, y: f64, t: f64, spec: &SolverSpec) -> Result<TensionPair, ElasticError> {
    let grid = GridSpec { x: vec![x], y: vec![y], t: vec![t] };
    let g = reconstruct_tension(scenario, &grid, spec)?;
    Ok(TensionPair { phi: g.phi[0][0][0], psi: g.psi[0][0][0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::ElasticLayer;

    fn half_space(load: Load) -> ElasticScenario {
        let layer = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
        ElasticScenario::new(vec![layer], vec![0.0], load).unwrap()
    }

    fn pulse(amplitude: f64) -> Load {
        Load::Pulse { amplitude, center: 0.0, width: 1.0, duration: 3.0 }
    }

    fn small_grid() -> GridSpec {
        GridSpec { x: vec![0.0, 0.4], y: vec![-0.5, 0.3], t: vec![0.0, 0.5] }
    }

    fn quick() -> SolverSpec {
        SolverSpec { transform: QuadratureSpec { lambda_max: 40.0, ..Default::default() }, xi_level: 1e-6 }
    }

    #[test]
    fn zero_load_gives_exact_zeros() {
        let g = reconstruct_tension(&half_space(Load::zero()), &small_grid(), &quick()).unwrap();
        assert_eq!(g.peak(), 0.0);
    }

    #[test]
    fn initial_state_vanishes() {
        let g = reconstruct_tension(&half_space(pulse(1.0)), &small_grid(), &quick()).unwrap();
        for ci in 0..g.columns.len() {
            for yi in 0..2 {
                assert!(g.phi[0][ci][yi].abs() < 1e-12 && g.psi[0][ci][yi].abs() < 1e-12);
            }
        }
        assert!(g.peak() > 0.0);
    }

    #[test]
    fn doubling_the_load_doubles_the_tension() {
        let a = reconstruct_tension(&half_space(pulse(1.0)), &small_grid(), &quick()).unwrap();
        let b = reconstruct_tension(&half_space(pulse(2.0)), &small_grid(), &quick()).unwrap();
        for (fa, fb) in a.phi.iter().chain(&a.psi).flatten().flatten().zip(b.phi.iter().chain(&b.psi).flatten().flatten()) {
            assert!((2.0 * fa - fb).abs() <= 1e-12 * a.peak());
        }
    }

    #[test]
    fn images_are_conjugate_symmetric() {
        let sc = half_space(pulse(1.0));
        let cols = columns(&sc, &[0.0, 0.3]);
        assert!(reality_probe(&sc, &cols, &[0.7], &quick(), &[0.8]).unwrap() < 1e-10);
    }

    #[test]
    fn interface_columns_are_duplicated() {
        let layer = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 2.0, c2: 1.0 };
        let sc = ElasticScenario::new(vec![layer, layer], vec![0.0, 0.5], Load::zero()).unwrap();
        assert_eq!(columns(&sc, &[0.0, 0.5, 0.7]), vec![(1, 0.0), (1, 0.5), (2, 0.5), (2, 0.7)]);
    }

    #[test]
    fn negative_times_and_points_outside_are_rejected() {
        let sc = half_space(pulse(1.0));
        let mut g = small_grid();
        g.t.push(-1.0);
        assert!(matches!(reconstruct_tension(&sc, &g, &quick()), Err(ElasticError::InvalidGrid(_))));
        let mut g = small_grid();
        g.x.push(-0.1);
        assert!(matches!(reconstruct_tension(&sc, &g, &quick()), Err(ElasticError::InvalidGrid(_))));
    }

    #[test]
    fn point_evaluation_matches_grid() {
        let sc = half_space(pulse(1.0));
        let g = reconstruct_tension(&sc, &small_grid(), &quick()).unwrap();
        let p = tension_at(&sc, 0.4, 0.3, 0.5, &quick()).unwrap();
        assert!((p.phi - g.phi[1][1][1]).abs() < 1e-8 * g.peak());
    }
}
