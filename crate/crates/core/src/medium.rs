//! Layered half-line geometry, per-layer coefficient matrices of
//! `A² y'' + (λ² E + Γ²) y = 0`, and the boundary and conjugation couplings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{determinant, CMatrix, Diagonalized, LinalgError, C64};

/// Which matrix of a layer failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerMatrix {
    ASq,
    GammaSq,
}

impl std::fmt::Display for LayerMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LayerMatrix::ASq => "A_sq",
            LayerMatrix::GammaSq => "Gamma_sq",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MediumError {
    #[error("interfaces must be strictly increasing (violated at index {index})")]
    NonIncreasingInterfaces { index: usize },
    #[error("layer {layer}: {which} is not {}", if *.which == LayerMatrix::ASq { "positive-definite" } else { "positive semi-definite" })]
    NotPositiveDefinite { layer: usize, which: LayerMatrix, min_eigenvalue: f64 },
    #[error("layer {layer}: {which} is not symmetric")]
    NotSymmetric { layer: usize, which: LayerMatrix },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: String, expected: usize, found: usize },
    #[error("at least one interface (l0) is required")]
    NoInterfaces,
    #[error("invertibility violated: det M_{m}{k} = {det:e} at lambda = {lambda}")]
    InvertibilityViolation { m: usize, k: usize, lambda: f64, det: f64 },
    #[error("lambda grid must be non-empty and positive")]
    BadLambdaGrid,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One homogeneous layer with its precomputed square-root factors.
#[derive(Debug, Clone)]
pub struct Layer {
    a_sq: CMatrix,
    gamma_sq: CMatrix,
    a: CMatrix,
    a_inv: CMatrix,
    gamma_semidefinite: bool,
}

impl Layer {
    pub fn a_sq(&self) -> &CMatrix {
        &self.a_sq
    }

    pub fn gamma_sq(&self) -> &CMatrix {
        &self.gamma_sq
    }

    /// Symmetric positive-definite square root of `A²`.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn a_inv(&self) -> &CMatrix {
        &self.a_inv
    }

    /// `Γ²` is singular (accepted, flagged).
    pub fn gamma_semidefinite(&self) -> bool {
        self.gamma_semidefinite
    }
}

/// Interfaces `l0 < l1 < ... < ln` and `n + 1` layers; the last is the tail `x > ln`.
#[derive(Debug, Clone)]
pub struct MediumStack {
    r: usize,
    interfaces: Vec<f64>,
    layers: Vec<Layer>,
}

/// Real parts of the eigenvalues of a Hermitian matrix.
pub fn symmetric_spectrum(m: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    let d = Diagonalized::new(m)?;
    Ok(d.values().iter().map(|v| v.re).collect())
}

impl MediumStack {
    /// Validates geometry and layer matrices. `layers[m]` is layer `m + 1`.
    pub fn new(r: usize, interfaces: Vec<f64>, layers: Vec<(CMatrix, CMatrix)>) -> Result<Self, MediumError> {
        if interfaces.is_empty() {
            return Err(MediumError::NoInterfaces);
        }
        if let Some(i) = interfaces.iter().position(|v| !v.is_finite()) {
            return Err(MediumError::NonIncreasingInterfaces { index: i });
        }
        if let Some(i) = interfaces.windows(2).position(|w| w[1] <= w[0]) {
            return Err(MediumError::NonIncreasingInterfaces { index: i + 1 });
        }
        if layers.len() != interfaces.len() {
            return Err(MediumError::DimensionMismatch {
                context: "layer count (one per interface)".into(),
                expected: interfaces.len(),
                found: layers.len(),
            });
        }
        let mut built = Vec::with_capacity(layers.len());
        for (idx, (a_sq, gamma_sq)) in layers.into_iter().enumerate() {
            let layer = idx + 1;
            for (m, which) in [(&a_sq, LayerMatrix::ASq), (&gamma_sq, LayerMatrix::GammaSq)] {
                if m.shape() != (r, r) {
                    return Err(MediumError::DimensionMismatch {
                        context: format!("layer {layer} {which}"),
                        expected: r,
                        found: if m.nrows() != r { m.nrows() } else { m.ncols() },
                    });
                }
                let tol = 1e-12 * m.frobenius_norm().max(f64::MIN_POSITIVE);
                if !m.is_hermitian(tol) || m.inner().iter().any(|z| z.im.abs() > tol) {
                    return Err(MediumError::NotSymmetric { layer, which });
                }
            }
            let a_eval = symmetric_spectrum(&a_sq)?;
            let a_min = a_eval.iter().copied().fold(f64::INFINITY, f64::min);
            if a_min <= 1e-12 * a_sq.frobenius_norm() {
                return Err(MediumError::NotPositiveDefinite { layer, which: LayerMatrix::ASq, min_eigenvalue: a_min });
            }
            let g_eval = symmetric_spectrum(&gamma_sq)?;
            let g_min = g_eval.iter().copied().fold(f64::INFINITY, f64::min);
            let g_tol = 1e-12 * gamma_sq.frobenius_norm();
            if g_min < -g_tol {
                return Err(MediumError::NotPositiveDefinite { layer, which: LayerMatrix::GammaSq, min_eigenvalue: g_min });
            }
            let gamma_semidefinite = g_min <= g_tol;
            if gamma_semidefinite {
                log::debug!("layer {layer}: Gamma_sq is singular (semi-definite accepted)");
            }
            let a = crate::linalg::principal_sqrt(&a_sq)?;
            let a_inv = a.inverse()?;
            built.push(Layer { a_sq, gamma_sq, a, a_inv, gamma_semidefinite });
        }
        Ok(MediumStack { r, interfaces, layers: built })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Interface abscissas `l0..ln`.
    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Number of internal interfaces `n`.
    pub fn n(&self) -> usize {
        self.interfaces.len() - 1
    }

    pub fn l0(&self) -> f64 {
        self.interfaces[0]
    }

    /// Layer `m` counted from 1.
    pub fn layer(&self, m: usize) -> &Layer {
        &self.layers[m - 1]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Left endpoint of layer `m` (1-based); the tail is anchored at `ln`.
    pub fn anchor(&self, m: usize) -> f64 {
        if m == self.layers.len() {
            self.interfaces[self.n()]
        } else {
            self.interfaces[m - 1]
        }
    }

    /// Layer (1-based) containing `x`; points on an interface belong to the layer on the left.
    pub fn layer_of(&self, x: f64) -> usize {
        let n = self.n();
        for k in 1..=n {
            if x <= self.interfaces[k] {
                return k;
            }
        }
        n + 1
    }

    /// Smallest layer thickness, infinite for a single layer.
    pub fn min_thickness(&self) -> f64 {
        self.interfaces.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Largest eigenvalue of `A⁻¹` over all layers: inverse of the slowest speed.
    pub fn max_slowness(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| symmetric_spectrum(&l.a_inv).map(|v| v.into_iter().fold(0.0, f64::max)).unwrap_or(1.0))
            .fold(0.0, f64::max)
    }
}

/// Coefficients of one differential condition `(α + λ² δ) d/dx + (β + λ² γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionQuad {
    pub alpha: CMatrix,
    pub beta: CMatrix,
    pub gamma: CMatrix,
    pub delta: CMatrix,
}

impl ConditionQuad {
    pub fn zeros(r: usize) -> Self {
        let z = CMatrix::zeros(r, r);
        ConditionQuad { alpha: z.clone(), beta: z.clone(), gamma: z.clone(), delta: z }
    }

    /// `(β + λ²γ, α + λ²δ)`: the value and derivative coefficients at `λ`.
    pub fn at(&self, lambda_sq: f64) -> (CMatrix, CMatrix) {
        (&self.beta + &self.gamma.scale_real(lambda_sq), &self.alpha + &self.delta.scale_real(lambda_sq))
    }

    /// `(β + μγ, α + μδ)` at a complex spectral parameter `μ = λ²`.
    pub fn at_mu(&self, mu: C64) -> (CMatrix, CMatrix) {
        (&self.beta + &self.gamma.scale(mu), &self.alpha + &self.delta.scale(mu))
    }

    pub fn has_spectral_terms(&self) -> bool {
        self.gamma.max_abs() != 0.0 || self.delta.max_abs() != 0.0
    }

    fn matrices(&self) -> [&CMatrix; 4] {
        [&self.alpha, &self.beta, &self.gamma, &self.delta]
    }
}

/// Side of an interface: 1 is layer `k`, 2 is layer `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left = 1,
    Right = 2,
}

/// Both conjugation conditions at one interface, indexed `[j - 1][m - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceCoupling {
    pub conditions: [[ConditionQuad; 2]; 2],
}

impl InterfaceCoupling {
    pub fn quad(&self, j: usize, side: Side) -> &ConditionQuad {
        &self.conditions[j - 1][side as usize - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    r: usize,
    pub boundary: ConditionQuad,
    pub interfaces: Vec<InterfaceCoupling>,
}

impl CouplingSet {
    pub fn new(r: usize, boundary: ConditionQuad, interfaces: Vec<InterfaceCoupling>) -> Result<Self, MediumError> {
        let check = |q: &ConditionQuad, ctx: &str| -> Result<(), MediumError> {
            for m in q.matrices() {
                if m.shape() != (r, r) {
                    return Err(MediumError::DimensionMismatch { context: ctx.to_string(), expected: r, found: m.nrows() });
                }
            }
            Ok(())
        };
        check(&boundary, "boundary coupling")?;
        for (k, ic) in interfaces.iter().enumerate() {
            for row in &ic.conditions {
                for q in row {
                    check(q, &format!("interface {} coupling", k + 1))?;
                }
            }
        }
        Ok(CouplingSet { r, boundary, interfaces })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Coupling at interface `k` (1-based).
    pub fn interface(&self, k: usize) -> &InterfaceCoupling {
        &self.interfaces[k - 1]
    }

    /// `true` when no condition carries `γ` or `δ` terms.
    pub fn spectral_terms_vanish(&self) -> bool {
        !self.boundary.has_spectral_terms()
            && self.interfaces.iter().all(|ic| ic.conditions.iter().flatten().all(|q| !q.has_spectral_terms()))
    }

    /// Checks that the coupling matches the medium's interface count.
    pub fn check_against(&self, medium: &MediumStack) -> Result<(), MediumError> {
        if self.r != medium.r() {
            return Err(MediumError::DimensionMismatch { context: "coupling r".into(), expected: medium.r(), found: self.r });
        }
        if self.interfaces.len() != medium.n() {
            return Err(MediumError::DimensionMismatch {
                context: "interface couplings".into(),
                expected: medium.n(),
                found: self.interfaces.len(),
            });
        }
        Ok(())
    }
}

/// `M_mk(λ)`: rows are the `j = 1, 2` conditions on side `m` of interface `k`,
/// columns are the value block `β + λ²γ` then the derivative block `α + λ²δ`.
pub fn assemble_m(coupling: &CouplingSet, side: Side, k: usize, lambda: f64) -> CMatrix {
    assemble_m_mu(coupling, side, k, C64::new(lambda * lambda, 0.0))
}

/// `M_mk` at a complex `μ = λ²`.
pub fn assemble_m_mu(coupling: &CouplingSet, side: Side, k: usize, mu: C64) -> CMatrix {
    let ic = coupling.interface(k);
    let (v1, d1) = ic.quad(1, side).at_mu(mu);
    let (v2, d2) = ic.quad(2, side).at_mu(mu);
    CMatrix::from_blocks(&v1, &d1, &v2, &d2)
}

/// The `μ`-coefficient of `M_mk`: blocks `γ` then `δ` of both conditions.
pub fn assemble_spectral_part(coupling: &CouplingSet, side: Side, k: usize) -> CMatrix {
    let ic = coupling.interface(k);
    let (q1, q2) = (ic.quad(1, side), ic.quad(2, side));
    CMatrix::from_blocks(&q1.gamma, &q1.delta, &q2.gamma, &q2.delta)
}

/// Minimum determinant found for one `(m, k)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DetRecord {
    pub m: usize,
    pub k: usize,
    pub min_det: f64,
    /// `min_det` divided by the product of row norms (Hadamard-normalised, in `[0, 1]`).
    pub min_relative: f64,
    pub at_lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertibilityCertificate {
    pub records: Vec<DetRecord>,
}

impl InvertibilityCertificate {
    pub fn min_relative(&self) -> f64 {
        self.records.iter().map(|r| r.min_relative).fold(1.0, f64::min)
    }
}

const DET_TOLERANCE: f64 = 1e-12;

/// Samples `det M_mk` on `lambda_grid` for every side and interface.
///
/// A node passes when `|det| > 1e-12 * s^{2r}` with `s` the largest row norm
/// of `M_mk` at that node.
pub fn check_invertibility(coupling: &CouplingSet, medium: &MediumStack, lambda_grid: &[f64]) -> Result<InvertibilityCertificate, MediumError> {
    coupling.check_against(medium)?;
    if lambda_grid.is_empty() || lambda_grid.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(MediumError::BadLambdaGrid);
    }
    let mut records = Vec::new();
    for k in 1..=medium.n() {
        for side in [Side::Left, Side::Right] {
            let mut rec = DetRecord { m: side as usize, k, min_det: f64::INFINITY, min_relative: f64::INFINITY, at_lambda: lambda_grid[0] };
            for &lambda in lambda_grid {
                let m = assemble_m(coupling, side, k, lambda);
                let det = determinant(&m).norm();
                let row_norms: Vec<f64> = (0..m.nrows()).map(|i| crate::linalg::vec_norm(&m.row(i))).collect();
                let scale = row_norms.iter().copied().fold(0.0, f64::max);
                let hadamard: f64 = row_norms.iter().product();
                let relative = if hadamard > 0.0 { det / hadamard } else { 0.0 };
                if !(det > DET_TOLERANCE * scale.powi(m.nrows() as i32)) {
                    return Err(MediumError::InvertibilityViolation { m: side as usize, k, lambda, det });
                }
                if det < rec.min_det {
                    rec.min_det = det;
                    rec.at_lambda = lambda;
                }
                rec.min_relative = rec.min_relative.min(relative);
            }
            records.push(rec);
        }
    }
    Ok(InvertibilityCertificate { records })
}

// ---------------------------------------------------------------------------
// Config format

/// Complex entry: `[re, im]`, or a bare real number on input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Pair([f64; 2]),
    Real(f64),
}

impl ComplexEntry {
    fn value(self) -> C64 {
        match self {
            ComplexEntry::Pair([a, b]) => C64::new(a, b),
            ComplexEntry::Real(a) => C64::new(a, 0.0),
        }
    }
}

pub type ComplexRows = Vec<Vec<ComplexEntry>>;

fn complex_rows(m: &CMatrix) -> ComplexRows {
    (0..m.nrows()).map(|i| m.row(i).into_iter().map(|z| ComplexEntry::Pair([z.re, z.im])).collect()).collect()
}

fn parse_complex(rows: &ComplexRows) -> Result<CMatrix, LinalgError> {
    let c: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    CMatrix::from_rows(&c)
}

fn real_rows(m: &CMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).into_iter().map(|z| z.re).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ComplexRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ComplexRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ComplexRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<ComplexRows>,
}

impl QuadConfig {
    /// Missing matrices are zero.
    fn build(&self, r: usize) -> Result<ConditionQuad, LinalgError> {
        let get = |m: &Option<ComplexRows>| m.as_ref().map_or_else(|| Ok(CMatrix::zeros(r, r)), parse_complex);
        Ok(ConditionQuad { alpha: get(&self.alpha)?, beta: get(&self.beta)?, gamma: get(&self.gamma)?, delta: get(&self.delta)? })
    }

    fn from_quad(q: &ConditionQuad) -> Self {
        QuadConfig {
            alpha: Some(complex_rows(&q.alpha)),
            beta: Some(complex_rows(&q.beta)),
            gamma: Some(complex_rows(&q.gamma)),
            delta: Some(complex_rows(&q.delta)),
        }
    }
}

/// Both sides of one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidePairConfig {
    pub left: QuadConfig,
    pub right: QuadConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceConfig {
    /// The `j = 1` and `j = 2` conditions.
    pub conditions: [SidePairConfig; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub boundary: QuadConfig,
    #[serde(default)]
    pub interfaces: Vec<InterfaceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerConfig {
    #[serde(rename = "A_sq")]
    pub a_sq: Vec<Vec<f64>>,
    #[serde(rename = "Gamma_sq")]
    pub gamma_sq: Vec<Vec<f64>>,
}

/// JSON description of a medium and its coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub r: usize,
    pub interfaces: Vec<f64>,
    pub layers: Vec<LayerConfig>,
    pub coupling: CouplingConfig,
}

/// Builds and validates the medium and coupling of a config.
pub fn build_medium(config: &MediumConfig) -> Result<(MediumStack, CouplingSet), MediumError> {
    let r = config.r;
    let layers = config
        .layers
        .iter()
        .map(|l| Ok((CMatrix::from_real_rows(&l.a_sq)?, CMatrix::from_real_rows(&l.gamma_sq)?)))
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let medium = MediumStack::new(r, config.interfaces.clone(), layers)?;
    let boundary = config.coupling.boundary.build(r)?;
    let interfaces = config
        .coupling
        .interfaces
        .iter()
        .map(|ic| {
            let [c1, c2] = &ic.conditions;
            Ok(InterfaceCoupling {
                conditions: [[c1.left.build(r)?, c1.right.build(r)?], [c2.left.build(r)?, c2.right.build(r)?]],
            })
        })
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let coupling = CouplingSet::new(r, boundary, interfaces)?;
    coupling.check_against(&medium)?;
    Ok((medium, coupling))
}

/// Inverse of [`build_medium`].
pub fn serialize_medium(medium: &MediumStack, coupling: &CouplingSet) -> MediumConfig {
    MediumConfig {
        r: medium.r(),
        interfaces: medium.interfaces().to_vec(),
        layers: medium
            .layers()
            .iter()
            .map(|l| LayerConfig { a_sq: real_rows(l.a_sq()), gamma_sq: real_rows(l.gamma_sq()) })
            .collect(),
        coupling: CouplingConfig {
            boundary: QuadConfig::from_quad(&coupling.boundary),
            interfaces: coupling
                .interfaces
                .iter()
                .map(|ic| InterfaceConfig {
                    conditions: [0, 1].map(|j| SidePairConfig {
                        left: QuadConfig::from_quad(&ic.conditions[j][0]),
                        right: QuadConfig::from_quad(&ic.conditions[j][1]),
                    }),
                })
                .collect(),
        },
    }
}

// ---------------------------------------------------------------------------
// Common couplings

/// `y(l0) = 0`: `β = -E`, everything else zero.
pub fn dirichlet_boundary(r: usize) -> ConditionQuad {
    ConditionQuad { beta: -CMatrix::identity(r), ..ConditionQuad::zeros(r) }
}

/// `y'(l0) = 0`: `α = E`.
pub fn neumann_boundary(r: usize) -> ConditionQuad {
    ConditionQuad { alpha: CMatrix::identity(r), ..ConditionQuad::zeros(r) }
}

/// Continuity of value (`j = 1`) and of `A² y'` (`j = 2`) across an interface.
pub fn flux_continuity(left: &Layer, right: &Layer) -> InterfaceCoupling {
    let r = left.a_sq().nrows();
    let value = ConditionQuad { beta: CMatrix::identity(r), ..ConditionQuad::zeros(r) };
    let flux = |l: &Layer| ConditionQuad { alpha: l.a_sq().clone(), ..ConditionQuad::zeros(r) };
    InterfaceCoupling { conditions: [[value.clone(), value], [flux(left), flux(right)]] }
}

/// Continuity of value and derivative.
pub fn transparent_interface(r: usize) -> InterfaceCoupling {
    let value = ConditionQuad { beta: CMatrix::identity(r), ..ConditionQuad::zeros(r) };
    let deriv = ConditionQuad { alpha: CMatrix::identity(r), ..ConditionQuad::zeros(r) };
    InterfaceCoupling { conditions: [[value.clone(), value], [deriv.clone(), deriv]] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn unit_layer(r: usize) -> (CMatrix, CMatrix) {
        (CMatrix::identity(r), CMatrix::zeros(r, r))
    }

    fn two_layer() -> (MediumStack, CouplingSet) {
        let medium = MediumStack::new(
            2,
            vec![0.0, 1.0],
            vec![
                (CMatrix::from_real_diag(&[3.0, 1.0]), CMatrix::from_real_diag(&[0.0, 0.5])),
                (CMatrix::from_real_diag(&[1.0, 2.0]), CMatrix::from_real_diag(&[0.25, 0.0])),
            ],
        )
        .unwrap();
        let ic = flux_continuity(medium.layer(1), medium.layer(2));
        let coupling = CouplingSet::new(2, dirichlet_boundary(2), vec![ic]).unwrap();
        (medium, coupling)
    }

    #[test]
    fn single_layer_is_valid() {
        let m = MediumStack::new(2, vec![0.0], vec![unit_layer(2)]).unwrap();
        assert_eq!(m.n(), 0);
        assert!(m.layer(1).gamma_semidefinite());
        assert_eq!(m.layer_of(5.0), 1);
    }

    #[test]
    fn repeated_interface_rejected() {
        let r = MediumStack::new(2, vec![0.0, 1.0, 1.0], vec![unit_layer(2), unit_layer(2), unit_layer(2)]);
        assert_eq!(r.unwrap_err(), MediumError::NonIncreasingInterfaces { index: 2 });
    }

    #[test]
    fn indefinite_a_rejected() {
        let r = MediumStack::new(2, vec![0.0], vec![(CMatrix::from_real_diag(&[1.0, -1.0]), CMatrix::zeros(2, 2))]);
        assert!(matches!(r, Err(MediumError::NotPositiveDefinite { layer: 1, which: LayerMatrix::ASq, .. })));
    }

    #[test]
    fn negative_gamma_rejected() {
        let r = MediumStack::new(1, vec![0.0], vec![(CMatrix::identity(1), CMatrix::from_real_diag(&[-0.1]))]);
        assert!(matches!(r, Err(MediumError::NotPositiveDefinite { which: LayerMatrix::GammaSq, .. })));
    }

    #[test]
    fn nonsymmetric_rejected() {
        let a = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let r = MediumStack::new(2, vec![0.0], vec![(a, CMatrix::zeros(2, 2))]);
        assert!(matches!(r, Err(MediumError::NotSymmetric { .. })));
    }

    #[test]
    fn layer_lookup_and_anchors() {
        let (m, _) = two_layer();
        assert_eq!(m.layer_of(0.5), 1);
        assert_eq!(m.layer_of(1.0), 1);
        assert_eq!(m.layer_of(1.5), 2);
        assert_eq!(m.anchor(1), 0.0);
        assert_eq!(m.anchor(2), 1.0);
    }

    #[test]
    fn m_without_spectral_terms_is_constant() {
        let (_, coupling) = two_layer();
        let a = assemble_m(&coupling, Side::Left, 1, 0.3);
        let b = assemble_m(&coupling, Side::Left, 1, 17.0);
        assert_eq!(a, b);
    }

    #[test]
    fn m_is_affine_in_lambda_squared() {
        let mut q = ConditionQuad::zeros(2);
        q.gamma = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        q.delta = CMatrix::from_diag(&[c(0.0, 1.0), c(2.0, 0.0)]);
        q.beta = CMatrix::identity(2);
        let ic = InterfaceCoupling { conditions: [[q.clone(), q.clone()], [q.clone(), q]] };
        let coupling = CouplingSet::new(2, dirichlet_boundary(2), vec![ic]).unwrap();
        let m0 = assemble_m(&coupling, Side::Right, 1, 0.0);
        let m1 = assemble_m(&coupling, Side::Right, 1, 1.0);
        let lam = 2.5;
        let expect = &m0 + &(&m1 - &m0).scale_real(lam * lam);
        assert!(assemble_m(&coupling, Side::Right, 1, lam).distance(&expect) < 1e-13);
    }

    #[test]
    fn zero_row_violates_invertibility() {
        let (medium, mut coupling) = two_layer();
        coupling.interfaces[0].conditions[0][0] = ConditionQuad::zeros(2);
        let r = check_invertibility(&coupling, &medium, &[1.0]);
        assert!(matches!(r, Err(MediumError::InvertibilityViolation { m: 1, k: 1, .. })));
    }

    #[test]
    fn no_interfaces_is_vacuous() {
        let medium = MediumStack::new(2, vec![0.0], vec![unit_layer(2)]).unwrap();
        let coupling = CouplingSet::new(2, dirichlet_boundary(2), vec![]).unwrap();
        assert!(check_invertibility(&coupling, &medium, &[1.0]).unwrap().records.is_empty());
    }

    #[test]
    fn refinement_never_raises_minimum() {
        let (medium, mut coupling) = two_layer();
        coupling.interfaces[0].conditions[1][1].delta = CMatrix::from_real_diag(&[0.1, -0.3]);
        let coarse: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let fine: Vec<f64> = (2..=20).map(|i| 0.5 * i as f64).collect();
        let a = check_invertibility(&coupling, &medium, &coarse).unwrap();
        let b = check_invertibility(&coupling, &medium, &fine).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert!(y.min_det <= x.min_det);
        }
    }

    #[test]
    fn config_round_trip() {
        let (medium, coupling) = two_layer();
        let cfg = serialize_medium(&medium, &coupling);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: MediumConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let (m2, c2) = build_medium(&back).unwrap();
        assert_eq!(c2, coupling);
        assert_eq!(serialize_medium(&m2, &c2), cfg);
    }

    #[test]
    fn config_accepts_sparse_quads_and_bare_reals() {
        let text = r#"{
            "r": 1, "interfaces": [0.0],
            "layers": [{"A_sq": [[1.0]], "Gamma_sq": [[0.0]]}],
            "coupling": {"boundary": {"beta": [[-1.0]], "alpha": [[[0.0, 2.0]]]}}
        }"#;
        let cfg: MediumConfig = serde_json::from_str(text).unwrap();
        let (_, coupling) = build_medium(&cfg).unwrap();
        assert_eq!(coupling.boundary.alpha.get(0, 0), c(0.0, 2.0));
        assert_eq!(coupling.boundary.beta.get(0, 0), c(-1.0, 0.0));
    }
}
