//! Layered isotropic half-plane and its mapping onto the transform framework.

use serde::{Deserialize, Serialize};

use crate::linalg::{c, CMatrix, C64};
use crate::medium::{ConditionQuad, CouplingSet, InterfaceCoupling, MediumError, MediumStack};

use super::load::Load;
use super::ElasticError;

/// One isotropic layer: Lamé constants and the two wave speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticLayer {
    pub lame_lambda: f64,
    pub lame_mu: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ElasticLayer {
    /// `D = diag(λ + 2μ, -μ)`, the second-derivative weights in the traction rows.
    fn d(&self) -> [f64; 2] {
        [self.lame_lambda + 2.0 * self.lame_mu, -self.lame_mu]
    }

    /// Densities implied by each speed; they agree for a consistent layer.
    pub fn implied_densities(&self) -> (f64, f64) {
        ((self.lame_lambda + 2.0 * self.lame_mu) / (self.c1 * self.c1), self.lame_mu / (self.c2 * self.c2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticScenario {
    layers: Vec<ElasticLayer>,
    interfaces: Vec<f64>,
    pub load: Load,
    c: f64,
}

impl ElasticScenario {
    pub fn new(layers: Vec<ElasticLayer>, interfaces: Vec<f64>, load: Load) -> Result<Self, ElasticError> {
        if interfaces.is_empty() {
            return Err(ElasticError::Medium(MediumError::NoInterfaces));
        }
        if layers.len() != interfaces.len() {
            return Err(ElasticError::Medium(MediumError::DimensionMismatch {
                context: "elastic layers".into(),
                expected: interfaces.len(),
                found: layers.len(),
            }));
        }
        for (i, w) in interfaces.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(ElasticError::Medium(MediumError::NonIncreasingInterfaces { index: i + 1 }));
            }
        }
        for (i, l) in layers.iter().enumerate() {
            let ok = l.lame_mu > 0.0 && l.lame_lambda + 2.0 * l.lame_mu > 0.0 && l.c1 > 0.0 && l.c2 > 0.0;
            if !ok || ![l.lame_lambda, l.lame_mu, l.c1, l.c2].iter().all(|v| v.is_finite()) {
                return Err(ElasticError::InvalidLayer { layer: i + 1 });
            }
            let (r1, r2) = l.implied_densities();
            if (r1 - r2).abs() > 1e-6 * r1.max(r2) {
                log::warn!("layer {}: speeds imply densities {r1} and {r2}", i + 1);
            }
        }
        let c = layers.iter().flat_map(|l| [l.c1, l.c2]).fold(0.0, f64::max);
        Ok(ElasticScenario { layers, interfaces, load, c })
    }

    pub fn layers(&self) -> &[ElasticLayer] {
        &self.layers
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Largest wave speed over all layers.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Layer index (1-based) containing `x`; interface points belong to the left layer.
    pub fn layer_of(&self, x: f64) -> usize {
        self.interfaces[1..].iter().take_while(|&&l| x > l).count() + 1
    }

    pub fn is_homogeneous(&self) -> bool {
        self.layers.windows(2).all(|w| w[0] == w[1])
    }

    /// `A_i² = diag(c1², c2²)` and `Γ_i² = diag((c² - c1²) ξ², (c² - c2²) ξ²)`.
    pub fn medium(&self, xi: f64) -> Result<MediumStack, ElasticError> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let a_sq = CMatrix::from_real_diag(&[l.c1 * l.c1, l.c2 * l.c2]);
                let g = [(self.c * self.c - l.c1 * l.c1) * xi * xi, (self.c * self.c - l.c2 * l.c2) * xi * xi];
                assert!(g.iter().all(|&v| v >= 0.0), "c is the maximum speed");
                (a_sq, CMatrix::from_real_diag(&g))
            })
            .collect();
        Ok(MediumStack::new(2, self.interfaces.clone(), layers)?)
    }

    /// Traction rows (normal stress, shear stress) of layer `i` (1-based).
    fn traction(&self, i: usize, xi: f64) -> ConditionQuad {
        let l = &self.layers[i - 1];
        let d = l.d();
        let a_inv_sq = [1.0 / (l.c1 * l.c1), 1.0 / (l.c2 * l.c2)];
        let g = [(self.c * self.c - l.c1 * l.c1) * xi * xi, (self.c * self.c - l.c2 * l.c2) * xi * xi];
        let shear = c(0.0, 2.0 * l.lame_mu * xi);
        ConditionQuad {
            alpha: CMatrix::from_rows(&[vec![c(0.0, 0.0), shear], vec![shear, c(0.0, 0.0)]]).expect("2x2"),
            beta: CMatrix::from_real_diag(&[
                -d[0] * a_inv_sq[0] * g[0] - l.lame_lambda * xi * xi,
                -d[1] * a_inv_sq[1] * g[1] - l.lame_mu * xi * xi,
            ]),
            gamma: CMatrix::from_real_diag(&[-d[0] * a_inv_sq[0], -d[1] * a_inv_sq[1]]),
            delta: CMatrix::zeros(2, 2),
        }
    }

    /// Displacement rows `(φ' + iξψ, -ψ' + iξφ)`, identical on both sides.
    fn displacement(xi: f64) -> ConditionQuad {
        let j = c(0.0, xi);
        let zero = C64::new(0.0, 0.0);
        ConditionQuad {
            alpha: CMatrix::from_real_diag(&[1.0, -1.0]),
            beta: CMatrix::from_rows(&[vec![zero, j], vec![j, zero]]).expect("2x2"),
            gamma: CMatrix::zeros(2, 2),
            delta: CMatrix::zeros(2, 2),
        }
    }

    /// Traction-free surface, continuity of traction (`j = 1`) and of
    /// displacement (`j = 2`) at each interface.
    pub fn coupling(&self, xi: f64) -> Result<CouplingSet, ElasticError> {
        let interfaces = (1..self.interfaces.len())
            .map(|k| {
                let disp = Self::displacement(xi);
                InterfaceCoupling { conditions: [[self.traction(k, xi), self.traction(k + 1, xi)], [disp.clone(), disp]] }
            })
            .collect();
        Ok(CouplingSet::new(2, self.traction(1, xi), interfaces)?)
    }

    /// Medium and coupling at transform variable `ξ`.
    pub fn build_coupling(&self, xi: f64) -> Result<(MediumStack, CouplingSet), ElasticError> {
        if !xi.is_finite() {
            return Err(ElasticError::NonFiniteXi);
        }
        Ok((self.medium(xi)?, self.coupling(xi)?))
    }
}
