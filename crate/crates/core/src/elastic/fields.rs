//! Displacements and stresses from sampled tension functions by fourth-order
//! finite differences, layer by layer.

use std::io::Write;

use serde::Serialize;

use super::solver::{Column, GridSpec, TensionGrid};
use super::{ElasticError, ElasticScenario, Load};

/// Weights of the derivative of order `d` at `x0` from the nodes `xs`
/// (Fornberg's recursion).
fn fd_weights(xs: &[f64], x0: f64, d: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; d + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(d);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[d]).collect()
}

/// Fourth-order derivative of order `d` of `f` sampled at `xs`, at every node:
/// centred five-point stencils inside, one-sided ones near the ends.
fn derivative(xs: &[f64], f: &[f64], d: usize) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let centred = i >= 2 && i + 2 < n;
            let width = if centred { 5 } else { (4 + d).min(n) };
            let start = (i as isize - (width / 2) as isize).clamp(0, (n - width) as isize) as usize;
            let w = fd_weights(&xs[start..start + width], xs[i], d);
            w.iter().zip(&f[start..start + width]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

fn is_uniform(v: &[f64]) -> bool {
    let h = v[1] - v[0];
    h > 0.0 && v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300))
}

/// Displacements and stresses on the grid of a [`TensionGrid`].
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub grid: GridSpec,
    pub columns: Vec<Column>,
    /// Each field as `[t][column][y]`.
    pub u: Vec<Vec<Vec<f64>>>,
    pub v: Vec<Vec<Vec<f64>>>,
    pub sigma_x: Vec<Vec<Vec<f64>>>,
    pub sigma_y: Vec<Vec<Vec<f64>>>,
    pub tau_xy: Vec<Vec<Vec<f64>>>,
}

/// Minimum nodes per direction (and per layer in `x`).
pub const MIN_NODES: usize = 5;

/// `u = φ_x + ψ_y`, `v = φ_y - ψ_x` and the plane-strain
/// stresses with each layer's Lamé constants.
pub fn fields_from_tension(scenario: &ElasticScenario, tension: &TensionGrid) -> Result<FieldGrid, ElasticError> {
    let g = &tension.grid;
    if g.y.len() < MIN_NODES {
        return Err(ElasticError::GridTooCoarse(format!("{} y nodes, need {MIN_NODES}", g.y.len())));
    }
    if !is_uniform(&g.y) || (g.x.len() >= 2 && !is_uniform(&g.x)) {
        return Err(ElasticError::GridTooCoarse("x and y nodes must be uniformly spaced".into()));
    }
    let cols = &tension.columns;
    let layers = scenario.layers().len();
    let by_layer: Vec<Vec<usize>> = (1..=layers).map(|m| (0..cols.len()).filter(|&i| cols[i].0 == m).collect()).collect();
    for (m, idx) in by_layer.iter().enumerate() {
        if !idx.is_empty() && idx.len() < MIN_NODES {
            return Err(ElasticError::GridTooCoarse(format!("layer {} holds {} x nodes, need {MIN_NODES}", m + 1, idx.len())));
        }
    }
    let nt = g.t.len();
    let ny = g.y.len();
    let blank = || vec![vec![vec![0.0; ny]; cols.len()]; nt];
    let mut out = FieldGrid { grid: g.clone(), columns: cols.clone(), u: blank(), v: blank(), sigma_x: blank(), sigma_y: blank(), tau_xy: blank() };
    for ti in 0..nt {
        for (m, idx) in by_layer.iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let layer = &scenario.layers()[m];
            let (lam, mu) = (layer.lame_lambda, layer.lame_mu);
            let xs: Vec<f64> = idx.iter().map(|&i| cols[i].1).collect();
            // x derivatives along each y row, then y derivatives along each column
            let along_x = |f: &Vec<Vec<Vec<f64>>>, d: usize| -> Vec<Vec<f64>> {
                let mut res = vec![vec![0.0; ny]; idx.len()];
                for yi in 0..ny {
                    let row: Vec<f64> = idx.iter().map(|&i| f[ti][i][yi]).collect();
                    for (k, val) in derivative(&xs, &row, d).into_iter().enumerate() {
                        res[k][yi] = val;
                    }
                }
                res
            };
            let along_y = |rows: &[Vec<f64>], d: usize| -> Vec<Vec<f64>> { rows.iter().map(|r| derivative(&g.y, r, d)).collect() };
            let local = |f: &Vec<Vec<Vec<f64>>>| -> Vec<Vec<f64>> { idx.iter().map(|&i| f[ti][i].clone()).collect() };
            let (phi, psi) = (local(&tension.phi), local(&tension.psi));
            let (phi_x, psi_x) = (along_x(&tension.phi, 1), along_x(&tension.psi, 1));
            let (phi_xx, psi_xx) = (along_x(&tension.phi, 2), along_x(&tension.psi, 2));
            let (phi_y, psi_y) = (along_y(&phi, 1), along_y(&psi, 1));
            let (phi_yy, psi_yy) = (along_y(&phi, 2), along_y(&psi, 2));
            let (phi_xy, psi_xy) = (along_y(&phi_x, 1), along_y(&psi_x, 1));
            for (k, &i) in idx.iter().enumerate() {
                for yi in 0..ny {
                    let lap = phi_xx[k][yi] + phi_yy[k][yi];
                    out.u[ti][i][yi] = phi_x[k][yi] + psi_y[k][yi];
                    out.v[ti][i][yi] = phi_y[k][yi] - psi_x[k][yi];
                    out.sigma_x[ti][i][yi] = lam * lap + 2.0 * mu * (phi_xx[k][yi] + psi_xy[k][yi]);
                    out.sigma_y[ti][i][yi] = lam * lap + 2.0 * mu * (phi_yy[k][yi] - psi_xy[k][yi]);
                    out.tau_xy[ti][i][yi] = mu * (2.0 * phi_xy[k][yi] - psi_xx[k][yi] + psi_yy[k][yi]);
                }
            }
        }
    }
    Ok(out)
}

/// Invariant residuals of a solved grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FieldChecks {
    /// `max |σ_x(l0, y, t) + p(y, t)| / max |p|` over times with load.
    pub surface_stress: f64,
    /// Largest `|φ|, |ψ|` ahead of the fastest front, over the peak.
    pub causality: f64,
    /// Per interface inside the grid: largest jump of `u, v, σ_x, τ_xy`, each over its own peak.
    pub conjugation: Vec<f64>,
}

fn peak(f: &[Vec<Vec<f64>>]) -> f64 {
    f.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

impl FieldGrid {
    /// CSV of one time slice with columns `x, y, u, v, sigma_x, sigma_y, tau_xy, layer_index`.
    pub fn write_csv<W: Write>(&self, t_index: usize, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "x,y,u,v,sigma_x,sigma_y,tau_xy,layer_index")?;
        for (ci, &(m, x)) in self.columns.iter().enumerate() {
            for (yi, &y) in self.grid.y.iter().enumerate() {
                writeln!(
                    out,
                    "{x:.10e},{y:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{m}",
                    self.u[t_index][ci][yi],
                    self.v[t_index][ci][yi],
                    self.sigma_x[t_index][ci][yi],
                    self.sigma_y[t_index][ci][yi],
                    self.tau_xy[t_index][ci][yi]
                )?;
            }
        }
        Ok(())
    }

    pub fn checks(&self, scenario: &ElasticScenario, tension: &TensionGrid) -> FieldChecks {
        FieldChecks {
            surface_stress: self.surface_stress_residual(scenario.interfaces()[0], &scenario.load),
            causality: causality_residual(tension, scenario),
            conjugation: self.conjugation_residuals(scenario),
        }
    }

    /// `max |σ_x(l0, y, t) + p(y, t)| / max |p|` over `t > 0`, zero when the
    /// grid has no surface column.
    pub fn surface_stress_residual(&self, l0: f64, load: &Load) -> f64 {
        let Some(ci) = self.columns.iter().position(|c| c.1 == l0) else { return 0.0 };
        let scale = load.peak();
        if scale == 0.0 {
            return peak(&self.sigma_x);
        }
        let mut worst: f64 = 0.0;
        for (ti, &t) in self.grid.t.iter().enumerate() {
            if t <= 0.0 {
                continue;
            }
            for (yi, &y) in self.grid.y.iter().enumerate() {
                worst = worst.max((self.sigma_x[ti][ci][yi] + load.eval(y, t)).abs());
            }
        }
        worst / scale
    }

    /// For each interface on a grid node, the largest jump of `u`, `v`, `σ_x`, `τ_xy`
    /// between its two one-sided columns, each relative to the field's peak.
    pub fn conjugation_residuals(&self, scenario: &ElasticScenario) -> Vec<f64> {
        let l = scenario.interfaces();
        let mut out = Vec::new();
        for k in 1..l.len() {
            let left = self.columns.iter().position(|&c| c == (k, l[k]));
            let right = self.columns.iter().position(|&c| c == (k + 1, l[k]));
            let (Some(a), Some(b)) = (left, right) else { continue };
            let mut worst: f64 = 0.0;
            for f in [&self.u, &self.v, &self.sigma_x, &self.tau_xy] {
                let scale = peak(f);
                if scale == 0.0 {
                    continue;
                }
                for ti in 0..self.grid.t.len() {
                    for yi in 0..self.grid.y.len() {
                        worst = worst.max((f[ti][a][yi] - f[ti][b][yi]).abs() / scale);
                    }
                }
            }
            out.push(worst);
        }
        out
    }
}

/// Largest `|φ|, |ψ|` at nodes the fastest wave cannot have reached,
/// `c t < x - l0`, relative to the peak over the grid.
pub fn causality_residual(tension: &TensionGrid, scenario: &ElasticScenario) -> f64 {
    let scale = tension.peak();
    if scale == 0.0 {
        return 0.0;
    }
    let l0 = scenario.interfaces()[0];
    let c = scenario.c();
    let mut worst: f64 = 0.0;
    for (ti, &t) in tension.grid.t.iter().enumerate() {
        for (ci, &(_, x)) in tension.columns.iter().enumerate() {
            if c * t < x - l0 {
                for yi in 0..tension.grid.y.len() {
                    worst = worst.max(tension.phi[ti][ci][yi].abs()).max(tension.psi[ti][ci][yi].abs());
                }
            }
        }
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::{ElasticLayer, TensionReport};

    fn scenario(lam: f64, mu: f64) -> ElasticScenario {
        ElasticScenario::new(vec![ElasticLayer { lame_lambda: lam, lame_mu: mu, c1: 2.0, c2: 1.0 }], vec![0.0], Load::zero()).unwrap()
    }

    fn sampled(f: impl Fn(f64, f64) -> (f64, f64)) -> TensionGrid {
        let grid = GridSpec { x: (0..7).map(|i| 0.25 * i as f64).collect(), y: (0..6).map(|i| -1.0 + 0.3 * i as f64).collect(), t: vec![1.0] };
        let columns: Vec<Column> = grid.x.iter().map(|&x| (1, x)).collect();
        let phi = vec![columns.iter().map(|&(_, x)| grid.y.iter().map(|&y| f(x, y).0).collect()).collect()];
        let psi = vec![columns.iter().map(|&(_, x)| grid.y.iter().map(|&y| f(x, y).1).collect()).collect()];
        TensionGrid { grid, columns, phi, psi, report: TensionReport::default() }
    }

    #[test]
    fn stencils_are_exact_on_quartics() {
        let xs: Vec<f64> = (0..7).map(|i| 0.3 * i as f64).collect();
        let f: Vec<f64> = xs.iter().map(|x| x.powi(4) - 2.0 * x.powi(3) + x).collect();
        let d1 = derivative(&xs, &f, 1);
        let d2 = derivative(&xs, &f, 2);
        for (i, x) in xs.iter().enumerate() {
            assert!((d1[i] - (4.0 * x.powi(3) - 6.0 * x * x + 1.0)).abs() < 1e-10);
            assert!((d2[i] - (12.0 * x * x - 12.0 * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn quadratic_potential_gives_constant_stress() {
        let g = fields_from_tension(&scenario(1.0, 1.0), &sampled(|x, _| (x * x, 0.0))).unwrap();
        for ci in 0..g.columns.len() {
            for yi in 0..g.grid.y.len() {
                assert!((g.sigma_x[0][ci][yi] - 6.0).abs() < 1e-9);
                assert!((g.sigma_y[0][ci][yi] - 2.0).abs() < 1e-9);
                assert!(g.tau_xy[0][ci][yi].abs() < 1e-9);
            }
        }
    }

    #[test]
    fn linear_potential_gives_unit_displacement() {
        let g = fields_from_tension(&scenario(1.0, 1.0), &sampled(|x, _| (x, 0.0))).unwrap();
        assert!(g.u.iter().flatten().flatten().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(g.v.iter().flatten().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn zero_potentials_give_zero_fields() {
        let g = fields_from_tension(&scenario(2.0, 0.5), &sampled(|_, _| (0.0, 0.0))).unwrap();
        for f in [&g.u, &g.v, &g.sigma_x, &g.sigma_y, &g.tau_xy] {
            assert_eq!(peak(f), 0.0);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let mut t = sampled(|x, _| (x, 0.0));
        t.grid.y.truncate(4);
        assert!(matches!(fields_from_tension(&scenario(1.0, 1.0), &t), Err(ElasticError::GridTooCoarse(_))));
    }
}
