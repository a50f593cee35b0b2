//! The homogeneous kernel
//! `H(x, z) = ∫₀^∞ Im(e^{ixη} [iη(α + η²δ) + β + η²γ]⁻¹) J₀(ηz) dη`
//! built from the surface condition rows.

use serde::{Deserialize, Serialize};

use crate::linalg::{bessel_j0, c, determinant, CMatrix};
use crate::medium::ConditionQuad;
use crate::quadrature::gl15;

use super::{ElasticError, ElasticScenario};

/// Controls of the `η` integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSpec {
    /// Upper limit of the `η` integral.
    pub eta_max: f64,
    /// Bisections allowed around a node where the symbol is singular.
    pub max_depth: usize,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec { eta_max: 200.0, max_depth: 8 }
    }
}

/// A real 2×2 kernel value with its quadrature bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelValue {
    pub h: [[f64; 2]; 2],
    /// Bound on `∫_{η_max}^∞`, from the `η⁻²` decay of the symbol inverse.
    pub tail: f64,
    /// Nodes dropped because the symbol was singular there.
    pub skipped: Vec<f64>,
}

/// `iη(α + η²δ) + β + η²γ`.
fn symbol(q: &ConditionQuad, eta: f64) -> CMatrix {
    let e2 = eta * eta;
    let spectral = &q.alpha + &q.delta.scale_real(e2);
    &(&spectral.scale(c(0.0, eta)) + &q.beta) + &q.gamma.scale_real(e2)
}

/// `Im(e^{ixη} M(η)⁻¹) J₀(ηz)`, `None` where `M` is singular.
fn integrand(q: &ConditionQuad, x: f64, z: f64, eta: f64) -> Option<[[f64; 2]; 2]> {
    let m = symbol(q, eta);
    let scale = m.max_abs().max(1e-300);
    if determinant(&m).norm() <= 1e-12 * scale * scale {
        return None;
    }
    let inv = m.inverse().ok()?;
    let phase = c(0.0, x * eta).exp();
    let j0 = bessel_j0(eta * z);
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (phase * inv.get(i, j)).im * j0;
        }
    }
    Some(out)
}

fn panel(q: &ConditionQuad, x: f64, z: f64, a: f64, b: f64, depth: usize, sum: &mut [[f64; 2]; 2], skipped: &mut Vec<f64>) {
    let mut local = [[0.0; 2]; 2];
    let mut singular = Vec::new();
    for (eta, w) in gl15().on(a, b) {
        match integrand(q, x, z, eta) {
            Some(v) => {
                for i in 0..2 {
                    for j in 0..2 {
                        local[i][j] += w * v[i][j];
                    }
                }
            }
            None => singular.push(eta),
        }
    }
    if singular.is_empty() {
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += local[i][j];
            }
        }
    } else if depth == 0 {
        log::debug!("kernel: singular symbol at {singular:?}, nodes skipped");
        skipped.extend(singular);
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += local[i][j];
            }
        }
    } else {
        let mid = 0.5 * (a + b);
        panel(q, x, z, a, mid, depth - 1, sum, skipped);
        panel(q, x, z, mid, b, depth - 1, sum, skipped);
    }
}

/// `H(x, z)` for surface rows `boundary`, with `x` measured from the surface
/// and `z ≥ 0`. Panels span at most one period of the faster of `e^{ixη}`
/// and `J₀(ηz)`.
pub fn kernel_h(boundary: &ConditionQuad, x: f64, z: f64, spec: &KernelSpec) -> Result<KernelValue, ElasticError> {
    if boundary.alpha.shape() != (2, 2) {
        return Err(ElasticError::InvalidGrid("the kernel needs 2×2 condition rows".into()));
    }
    if !(x.is_finite() && z.is_finite() && z >= 0.0 && x >= 0.0) {
        return Err(ElasticError::InvalidGrid(format!("kernel arguments need x ≥ 0 and z ≥ 0, got ({x}, {z})")));
    }
    if integrand(boundary, x, z, 0.0).is_none() {
        return Err(ElasticError::SingularSymbol { eta: 0.0 });
    }
    let width = (2.0 * std::f64::consts::PI / (x + z).max(1e-12)).min(1.0);
    let n = (spec.eta_max / width).ceil().max(1.0) as usize;
    let h = spec.eta_max / n as f64;
    let mut sum = [[0.0; 2]; 2];
    let mut skipped = Vec::new();
    for k in 0..n {
        panel(boundary, x, z, k as f64 * h, (k + 1) as f64 * h, spec.max_depth, &mut sum, &mut skipped);
    }
    // ‖M⁻¹‖ ≤ C/η² and |J₀(s)| ≤ √(2/(πs)) past the last node
    let e = spec.eta_max;
    let decay = symbol(boundary, e).inverse().map_or(f64::INFINITY, |m| m.max_abs() * e * e);
    let j_bound = if z > 0.0 { (2.0 / (std::f64::consts::PI * z)).sqrt() * e.powf(-1.5) * 2.0 / 3.0 } else { 1.0 / e };
    Ok(KernelValue { h: sum, tail: decay * j_bound, skipped })
}

/// `H(x, z)` for a homogeneous scenario at transform variable `ξ`.
pub fn kernel_h_homogeneous(scenario: &ElasticScenario, xi: f64, x: f64, z: f64, spec: &KernelSpec) -> Result<KernelValue, ElasticError> {
    if !scenario.is_homogeneous() {
        return Err(ElasticError::NotHomogeneous);
    }
    let coupling = scenario.coupling(xi)?;
    kernel_h(&coupling.boundary, x - scenario.interfaces()[0], z, spec)
}
