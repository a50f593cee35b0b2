//! Eigenfunctions of the layered problem at a fixed spectral parameter.
//!
//! On layer `m` the general solution is
//! `F(x) = exp(i q (x - a)) P + exp(-i q (x - a)) Q` with `a` the left end of
//! the layer (`ln` for the tail) and `q² = A⁻²(λ² E + Γ²)`. Coefficients are
//! kept in the eigenbasis of `q`: with `q = V diag(κ) V⁻¹` the stored blocks
//! are `P̂ = V⁻¹ P` and `Q̂ = V⁻¹ Q`, so evaluation costs one matrix product.

use std::io::Write;

use thiserror::Error;

use crate::linalg::{block_solve, CMatrix, Diagonalized, LinalgError, C64, I};
use crate::medium::{assemble_m, CouplingSet, MediumStack, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("spectral parameter must be positive and finite, got {0}")]
    NonPositiveLambda(f64),
    #[error("layer {layer}: wavenumber singular at lambda = {lambda} (min |eigenvalue| {min:e})")]
    SingularWavenumber { layer: usize, lambda: f64, min: f64 },
    #[error("interface {interface}: singular conjugation system at lambda = {lambda}")]
    SingularInterface { interface: usize, lambda: f64 },
    #[error("boundary images not invertible at lambda = {lambda}")]
    SingularBoundaryImage { lambda: f64 },
    #[error("layer {layer}: Wronskian block singular at lambda = {lambda}")]
    SingularWronskian { layer: usize, lambda: f64 },
    #[error("{what} singular at mu = {mu}")]
    SingularAtMu { what: String, mu: C64 },
    #[error("layer {layer}: {source}")]
    Linalg { layer: usize, source: LinalgError },
}

/// Eigen-factorisation `q = V diag(κ) V⁻¹` of one layer's wavenumber.
#[derive(Debug, Clone)]
pub struct LayerWave {
    pub layer: usize,
    pub kappa: Vec<C64>,
    pub v: CMatrix,
    pub v_inv: CMatrix,
}

impl LayerWave {
    /// The wavenumber matrix `q`.
    pub fn q(&self) -> CMatrix {
        &self.v * &self.v_inv.scale_rows(&self.kappa)
    }

    pub fn max_kappa(&self) -> f64 {
        self.kappa.iter().map(|k| k.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn diag(&self, f: impl Fn(C64) -> C64) -> Vec<C64> {
        self.kappa.iter().map(|&k| f(k)).collect()
    }
}

/// Principal square root of `A_m⁻²(λ² E + Γ_m²)` for layer `m` (1-based).
///
/// `S = A⁻¹(λ² E + Γ²)A⁻¹` is symmetric positive-definite and similar to
/// `q²`, so with `S = W s Wᴴ` the basis `V = A⁻¹ W` diagonalises `q`.
pub fn wavenumber(medium: &MediumStack, m: usize, lambda: f64) -> Result<LayerWave, SpectralError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SpectralError::NonPositiveLambda(lambda));
    }
    let layer = medium.layer(m);
    let r = medium.r();
    let shifted = layer.gamma_sq() + &CMatrix::identity(r).scale_real(lambda * lambda);
    let s = &(layer.a_inv() * &shifted) * layer.a_inv();
    let eig = Diagonalized::new(&s).map_err(|source| SpectralError::Linalg { layer: m, source })?;
    let kappa: Vec<C64> = eig.values().iter().map(|v| C64::new(v.re.max(0.0).sqrt(), 0.0)).collect();
    let max = kappa.iter().map(|k| k.norm()).fold(0.0, f64::max);
    let min = kappa.iter().map(|k| k.norm()).fold(f64::INFINITY, f64::min);
    if min < 1e-12 * max.max(1.0) {
        return Err(SpectralError::SingularWavenumber { layer: m, lambda, min });
    }
    let v = layer.a_inv() * eig.vectors();
    let v_inv = eig.inverse() * layer.a();
    Ok(LayerWave { layer: m, kappa, v, v_inv })
}

/// Wavenumber at a complex `μ = λ²`, taking for each mode the root with
/// `Im κ ≥ 0` so that `e^{iκx}` is bounded. On the positive axis this is the
/// limit from above, which agrees with [`wavenumber`].
pub fn wavenumber_mu(medium: &MediumStack, m: usize, mu: C64) -> Result<LayerWave, SpectralError> {
    let layer = medium.layer(m);
    let r = medium.r();
    let shifted = layer.gamma_sq() + &CMatrix::identity(r).scale(mu);
    let s = &(layer.a_inv() * &shifted) * layer.a_inv();
    let eig = Diagonalized::new(&s).map_err(|source| SpectralError::Linalg { layer: m, source })?;
    let kappa: Vec<C64> = eig
        .values()
        .iter()
        .map(|&v| {
            let k = I * (-v).sqrt();
            // the positive axis is approached from above
            if k.im == 0.0 && k.re < 0.0 { -k } else { k }
        })
        .collect();
    let max = kappa.iter().map(|k| k.norm()).fold(0.0, f64::max);
    let min = kappa.iter().map(|k| k.norm()).fold(f64::INFINITY, f64::min);
    if min < 1e-12 * max.max(1.0) {
        return Err(SpectralError::SingularAtMu { what: format!("layer {m} wavenumber"), mu });
    }
    let v = layer.a_inv() * eig.vectors();
    let v_inv = eig.inverse() * layer.a();
    Ok(LayerWave { layer: m, kappa, v, v_inv })
}

/// `F(x) = V[diag(e^{iκs}) P̂ + diag(e^{-iκs}) Q̂]`, `s = x - anchor`.
#[derive(Debug, Clone)]
pub struct LayerExpRep {
    pub wave: LayerWave,
    pub anchor: f64,
    pub p_hat: CMatrix,
    pub q_hat: CMatrix,
}

impl LayerExpRep {
    /// Builds the representation from full coefficient blocks `P`, `Q`.
    pub fn from_pq(wave: LayerWave, anchor: f64, p: &CMatrix, q: &CMatrix) -> Self {
        let p_hat = &wave.v_inv * p;
        let q_hat = &wave.v_inv * q;
        LayerExpRep { wave, anchor, p_hat, q_hat }
    }

    /// Representation with prescribed value and derivative at `x`.
    pub fn from_jet(wave: LayerWave, anchor: f64, x: f64, value: &CMatrix, derivative: &CMatrix) -> Self {
        let d = x - anchor;
        let g = &wave.v_inv * value;
        let h = (&wave.v_inv * derivative).scale_rows(&wave.diag(|k| 1.0 / (I * k)));
        let p_hat = (&g + &h).scale_rows(&wave.diag(|k| 0.5 * (-I * k * d).exp()));
        let q_hat = (&g - &h).scale_rows(&wave.diag(|k| 0.5 * (I * k * d).exp()));
        LayerExpRep { wave, anchor, p_hat, q_hat }
    }

    pub fn p(&self) -> CMatrix {
        &self.wave.v * &self.p_hat
    }

    pub fn q(&self) -> CMatrix {
        &self.wave.v * &self.q_hat
    }

    /// `n`-th derivative at `x`.
    pub fn derivative(&self, x: f64, n: u32) -> CMatrix {
        let s = x - self.anchor;
        let plus = self.wave.diag(|k| (I * k).powu(n) * (I * k * s).exp());
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let minus = self.wave.diag(|k| (I * k).powu(n) * sign * (-I * k * s).exp());
        &self.wave.v * &(self.p_hat.scale_rows(&plus) + self.q_hat.scale_rows(&minus))
    }

    pub fn eval(&self, x: f64) -> CMatrix {
        self.derivative(x, 0)
    }

    /// Value stacked above derivative (`2r x cols`).
    pub fn jet(&self, x: f64) -> CMatrix {
        CMatrix::vstack(&self.eval(x), &self.derivative(x, 1))
    }

    /// Right-multiplies both coefficient blocks, `F -> F R`.
    pub fn times(&self, rhs: &CMatrix) -> LayerExpRep {
        LayerExpRep { wave: self.wave.clone(), anchor: self.anchor, p_hat: &self.p_hat * rhs, q_hat: &self.q_hat * rhs }
    }

    fn minus(&self, other: &LayerExpRep) -> LayerExpRep {
        LayerExpRep {
            wave: self.wave.clone(),
            anchor: self.anchor,
            p_hat: &self.p_hat - &other.p_hat,
            q_hat: &self.q_hat - &other.q_hat,
        }
    }
}

/// Row-structured dual function on one layer:
/// `u*(x) = G₋ diag(e^{-iκs}) H + G₊ diag(e^{iκs}) H`.
#[derive(Debug, Clone)]
pub struct DualRep {
    pub kappa: Vec<C64>,
    pub anchor: f64,
    pub g_minus: CMatrix,
    pub g_plus: CMatrix,
    pub h: CMatrix,
}

impl DualRep {
    pub fn derivative(&self, x: f64, n: u32) -> CMatrix {
        let s = x - self.anchor;
        let minus: Vec<C64> = self.kappa.iter().map(|&k| (-I * k).powu(n) * (-I * k * s).exp()).collect();
        let plus: Vec<C64> = self.kappa.iter().map(|&k| (I * k).powu(n) * (I * k * s).exp()).collect();
        let mid = self.g_minus.scale_cols(&minus) + self.g_plus.scale_cols(&plus);
        &mid * &self.h
    }

    pub fn eval(&self, x: f64) -> CMatrix {
        self.derivative(x, 0)
    }

    /// Bound on `‖u*(x)‖_F` valid for every `x` in the layer (real `κ`).
    pub fn envelope(&self) -> f64 {
        (self.g_minus.frobenius_norm() + self.g_plus.frobenius_norm()) * self.h.frobenius_norm()
    }
}

/// `(Φ, Ψ)` on the tail, anchored at `ln`: `P_Φ = exp(i q ln)`, `Q_Ψ = exp(-i q ln)`.
pub fn tail_pair(medium: &MediumStack, lambda: f64) -> Result<(LayerExpRep, LayerExpRep), SpectralError> {
    let m = medium.layer_count();
    let wave = wavenumber(medium, m, lambda)?;
    Ok(tail_pair_with(medium, wave))
}

fn tail_pair_with(medium: &MediumStack, wave: LayerWave) -> (LayerExpRep, LayerExpRep) {
    let r = medium.r();
    let ln = medium.interfaces()[medium.n()];
    let zero = CMatrix::zeros(r, r);
    let phase_p = wave.v_inv.scale_rows(&wave.diag(|k| (I * k * ln).exp()));
    let phase_m = wave.v_inv.scale_rows(&wave.diag(|k| (-I * k * ln).exp()));
    let phi = LayerExpRep { wave: wave.clone(), anchor: ln, p_hat: phase_p, q_hat: zero.clone() };
    let psi = LayerExpRep { wave, anchor: ln, p_hat: zero, q_hat: phase_m };
    (phi, psi)
}

/// One step of the downward recursion across interface `k`.
///
/// Solves `M_1k [F_k; F_k'](l_k) = M_2k [F_{k+1}; F_{k+1}'](l_k)` for both
/// functions at once and re-anchors the result at `l_{k-1}`.
pub fn descend_interface(
    medium: &MediumStack,
    coupling: &CouplingSet,
    k: usize,
    phi_next: &LayerExpRep,
    psi_next: &LayerExpRep,
    wave_k: LayerWave,
    lambda: f64,
) -> Result<(LayerExpRep, LayerExpRep), SpectralError> {
    let r = medium.r();
    let lk = medium.interfaces()[k];
    let m1 = assemble_m(coupling, Side::Left, k, lambda);
    let m2 = assemble_m(coupling, Side::Right, k, lambda);
    let rhs = &m2 * &CMatrix::hstack(&phi_next.jet(lk), &psi_next.jet(lk));
    let x = block_solve(&m1, &rhs).map_err(|_| SpectralError::SingularInterface { interface: k, lambda })?;
    if wave_k.kappa.iter().any(|k| k.norm() == 0.0) {
        return Err(SpectralError::SingularWavenumber { layer: k, lambda, min: 0.0 });
    }
    let anchor = medium.anchor(k);
    let phi = LayerExpRep::from_jet(wave_k.clone(), anchor, lk, &x.block(0, 0, r, r), &x.block(r, 0, r, r));
    let psi = LayerExpRep::from_jet(wave_k, anchor, lk, &x.block(0, r, r, r), &x.block(r, r, r, r));
    Ok((phi, psi))
}

/// `(Φ̊, Ψ̊)`: the boundary operator applied to `Φ₁`, `Ψ₁` at `l0`.
pub fn boundary_images(medium: &MediumStack, phi1: &LayerExpRep, psi1: &LayerExpRep, coupling: &CouplingSet, lambda: f64) -> (CMatrix, CMatrix) {
    let l0 = medium.l0();
    let (value, deriv) = coupling.boundary.at(lambda * lambda);
    let image = |f: &LayerExpRep| &(&deriv * &f.derivative(l0, 1)) + &(&value * &f.eval(l0));
    (image(phi1), image(psi1))
}

/// Fundamental pair, boundary images, spectral and dual functions at one `λ`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub lambda: f64,
    pub phi: Vec<LayerExpRep>,
    pub psi: Vec<LayerExpRep>,
    pub phi0: CMatrix,
    pub psi0: CMatrix,
    u: Vec<LayerExpRep>,
    dual: Vec<DualRep>,
    interfaces: Vec<f64>,
}

impl SpectralBasis {
    pub fn build(medium: &MediumStack, coupling: &CouplingSet, lambda: f64) -> Result<Self, SpectralError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(SpectralError::NonPositiveLambda(lambda));
        }
        let layers = medium.layer_count();
        let mut waves = (1..=layers).map(|m| wavenumber(medium, m, lambda)).collect::<Result<Vec<_>, _>>()?;
        let tail_wave = waves.pop().expect("at least one layer");
        let (mut phi_next, mut psi_next) = tail_pair_with(medium, tail_wave);
        let mut phi = vec![phi_next.clone()];
        let mut psi = vec![psi_next.clone()];
        for k in (1..layers).rev() {
            let wave = waves.pop().expect("one wave per layer");
            let (p, s) = descend_interface(medium, coupling, k, &phi_next, &psi_next, wave, lambda)?;
            phi.push(p.clone());
            psi.push(s.clone());
            phi_next = p;
            psi_next = s;
        }
        phi.reverse();
        psi.reverse();

        let (phi0, psi0) = boundary_images(medium, &phi[0], &psi[0], coupling, lambda);
        let phi0_inv = phi0.inverse().map_err(|_| SpectralError::SingularBoundaryImage { lambda })?;
        let psi0_inv = psi0.inverse().map_err(|_| SpectralError::SingularBoundaryImage { lambda })?;

        let u: Vec<LayerExpRep> = phi.iter().zip(&psi).map(|(p, s)| p.times(&phi0_inv).minus(&s.times(&psi0_inv))).collect();

        let r = medium.r();
        let images = CMatrix::hstack(&phi0, &psi0);
        let mut dual = Vec::with_capacity(layers);
        for (idx, (p, s)) in phi.iter().zip(&psi).enumerate() {
            let m = idx + 1;
            let c = CMatrix::from_blocks(&p.p_hat, &s.p_hat, &p.q_hat, &s.q_hat);
            let c_inv = c.inverse().map_err(|_| SpectralError::SingularWronskian { layer: m, lambda })?;
            let rows = (&images * &c_inv).scale_real(0.5);
            let a_inv = medium.layer(m).a_inv();
            let a_inv_sq = a_inv * a_inv;
            let h = (&p.wave.v_inv * &a_inv_sq).scale_rows(&p.wave.diag(|k| 1.0 / (I * k)));
            dual.push(DualRep {
                kappa: p.wave.kappa.clone(),
                anchor: p.anchor,
                g_minus: rows.block(0, 0, r, r),
                g_plus: -rows.block(0, r, r, r),
                h,
            });
        }
        Ok(SpectralBasis { lambda, phi, psi, phi0, psi0, u, dual, interfaces: medium.interfaces().to_vec() })
    }

    fn layer_of(&self, x: f64) -> usize {
        let n = self.interfaces.len() - 1;
        (1..=n).find(|&k| x <= self.interfaces[k]).unwrap_or(n + 1)
    }

    /// Spectral function `u = Φ Φ̊⁻¹ - Ψ Ψ̊⁻¹` on layer `m` (1-based).
    pub fn u_layer(&self, m: usize) -> &LayerExpRep {
        &self.u[m - 1]
    }

    pub fn dual_layer(&self, m: usize) -> &DualRep {
        &self.dual[m - 1]
    }

    pub fn spectral_u(&self, x: f64) -> CMatrix {
        self.u_layer(self.layer_of(x)).eval(x)
    }

    pub fn dual_u(&self, xi: f64) -> CMatrix {
        self.dual_layer(self.layer_of(xi)).eval(xi)
    }

    /// `Ω_m(x) = [[Φ, Ψ], [Φ', Ψ']]` on layer `m`.
    pub fn omega(&self, m: usize, x: f64) -> CMatrix {
        CMatrix::hstack(&self.phi[m - 1].jet(x), &self.psi[m - 1].jet(x))
    }

    /// `u*` assembled literally as `(Φ̊, Ψ̊) Ω⁻¹ [0; E] A⁻²`.
    pub fn dual_u_direct(&self, medium: &MediumStack, xi: f64) -> Result<CMatrix, SpectralError> {
        let m = self.layer_of(xi);
        let r = medium.r();
        let rhs = CMatrix::vstack(&CMatrix::zeros(r, r), &CMatrix::identity(r));
        let sol = block_solve(&self.omega(m, xi), &rhs).map_err(|_| SpectralError::SingularWronskian { layer: m, lambda: self.lambda })?;
        let a_inv = medium.layer(m).a_inv();
        Ok(&(&CMatrix::hstack(&self.phi0, &self.psi0) * &sol) * &(a_inv * a_inv))
    }
}

/// Relative residuals of the structural identities of a basis.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BasisResiduals {
    /// Conjugation conditions for `Φ`, `Ψ` and `u`.
    pub interface: f64,
    /// Dual conjugation conditions for `u*`.
    pub dual_interface: f64,
    /// Boundary operator applied to `u` at `l0`, relative to `‖Φ̊‖`.
    pub boundary: f64,
}

pub fn basis_residuals(basis: &SpectralBasis, medium: &MediumStack, coupling: &CouplingSet) -> BasisResiduals {
    let lambda = basis.lambda;
    let mut res = BasisResiduals::default();
    for k in 1..=medium.n() {
        let lk = medium.interfaces()[k];
        let m1 = assemble_m(coupling, Side::Left, k, lambda);
        let m2 = assemble_m(coupling, Side::Right, k, lambda);
        let pairs = [
            (&basis.phi[k - 1], &basis.phi[k]),
            (&basis.psi[k - 1], &basis.psi[k]),
            (&basis.u[k - 1], &basis.u[k]),
        ];
        for (left, right) in pairs {
            let lhs = &m1 * &left.jet(lk);
            let rhs = &m2 * &right.jet(lk);
            let scale = lhs.frobenius_norm().max(rhs.frobenius_norm()).max(f64::MIN_POSITIVE);
            res.interface = res.interface.max(lhs.distance(&rhs) / scale);
        }
        let row = |m: usize| {
            let d = &basis.dual[m - 1];
            let a_sq = medium.layer(m).a_sq();
            CMatrix::hstack(&-(&d.derivative(lk, 1) * a_sq), &(&d.eval(lk) * a_sq))
        };
        if let (Ok(m1_inv), Ok(m2_inv)) = (m1.inverse(), m2.inverse()) {
            let lhs = &row(k) * &m1_inv;
            let rhs = &row(k + 1) * &m2_inv;
            let scale = lhs.frobenius_norm().max(rhs.frobenius_norm()).max(f64::MIN_POSITIVE);
            res.dual_interface = res.dual_interface.max(lhs.distance(&rhs) / scale);
        } else {
            res.dual_interface = f64::INFINITY;
        }
    }
    let l0 = medium.l0();
    let (value, deriv) = coupling.boundary.at(lambda * lambda);
    let u1 = &basis.u[0];
    let b = &(&deriv * &u1.derivative(l0, 1)) + &(&value * &u1.eval(l0));
    res.boundary = b.frobenius_norm() / basis.phi0.frobenius_norm().max(f64::MIN_POSITIVE);
    res
}

/// Writes `u` and `u*` samples as CSV: `lambda, layer, x`, then real and
/// imaginary parts of every entry of `u` followed by those of `u*` (row-major).
pub fn write_spectrum_csv<W: Write>(
    out: &mut W,
    medium: &MediumStack,
    coupling: &CouplingSet,
    lambdas: &[f64],
    xs: &[f64],
) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let r = medium.r();
    let mut header = vec!["lambda".to_string(), "layer".into(), "x".into()];
    for name in ["u", "ustar"] {
        for i in 1..=r {
            for j in 1..=r {
                header.push(format!("re_{name}_{i}{j}"));
                header.push(format!("im_{name}_{i}{j}"));
            }
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for &lambda in lambdas {
        let basis = SpectralBasis::build(medium, coupling, lambda)?;
        for &x in xs {
            let mut row = vec![format!("{lambda:.17e}"), medium.layer_of(x).to_string(), format!("{x:.17e}")];
            for m in [basis.spectral_u(x), basis.dual_u(x)] {
                for i in 0..r {
                    for j in 0..r {
                        let z = m.get(i, j);
                        row.push(format!("{:.17e}", z.re));
                        row.push(format!("{:.17e}", z.im));
                    }
                }
            }
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::medium::{dirichlet_boundary, flux_continuity, neumann_boundary, transparent_interface, ConditionQuad, InterfaceCoupling};

    fn single(r: usize, bc: ConditionQuad) -> (MediumStack, CouplingSet) {
        let m = MediumStack::new(r, vec![0.0], vec![(CMatrix::identity(r), CMatrix::zeros(r, r))]).unwrap();
        let cpl = CouplingSet::new(r, bc, vec![]).unwrap();
        (m, cpl)
    }

    #[test]
    fn wavenumber_examples() {
        let (m, _) = single(2, dirichlet_boundary(2));
        assert!(wavenumber(&m, 1, 2.0).unwrap().q().distance(&CMatrix::identity(2).scale_real(2.0)) < 1e-14);
        let m = MediumStack::new(2, vec![0.0], vec![(CMatrix::from_real_diag(&[4.0, 1.0]), CMatrix::from_real_diag(&[0.0, 3.0]))]).unwrap();
        let q = wavenumber(&m, 1, 1.0).unwrap().q();
        assert!(q.distance(&CMatrix::from_real_diag(&[0.5, 2.0])) < 1e-14);
    }

    #[test]
    fn wavenumber_squares_to_general_symbol() {
        let a_sq = CMatrix::from_real_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let g_sq = CMatrix::from_real_rows(&[vec![0.3, 0.1], vec![0.1, 0.2]]).unwrap();
        let m = MediumStack::new(2, vec![0.0], vec![(a_sq.clone(), g_sq.clone())]).unwrap();
        let lambda = 1.7;
        let q = wavenumber(&m, 1, lambda).unwrap().q();
        let target = &a_sq.inverse().unwrap() * &(&g_sq + &CMatrix::identity(2).scale_real(lambda * lambda));
        assert!((&q * &q).distance(&target) < 1e-10 * target.frobenius_norm());
    }

    #[test]
    fn tail_pair_anchor_identity() {
        let m = MediumStack::new(2, vec![0.0, 1.5], vec![(CMatrix::identity(2), CMatrix::zeros(2, 2)); 2]).unwrap();
        let (phi, psi) = tail_pair(&m, 1.3).unwrap();
        let q = wavenumber(&m, 2, 1.3).unwrap().q();
        let e = crate::linalg::exp_iqx(&q, 1.5).unwrap();
        assert!(phi.eval(1.5).distance(&e) < 1e-14);
        assert!(psi.eval(1.5).distance(&crate::linalg::exp_iqx(&q, -1.5).unwrap()) < 1e-14);
        assert!(phi.p().distance(&e) < 1e-14 && phi.q().max_abs() == 0.0);
    }

    #[test]
    fn single_layer_tail_is_plane_wave() {
        let (m, _) = single(2, dirichlet_boundary(2));
        let (phi, psi) = tail_pair(&m, 1.0).unwrap();
        for &x in &[0.0, 0.4, 3.0] {
            let e = C64::new(0.0, x).exp();
            assert!(phi.eval(x).distance(&CMatrix::identity(2).scale(e)) < 1e-14);
            assert!(psi.eval(x).distance(&CMatrix::identity(2).scale(e.conj())) < 1e-14);
        }
    }

    #[test]
    fn dirichlet_and_neumann_images() {
        let lambda = 2.3;
        let (m, cpl) = single(2, dirichlet_boundary(2));
        let b = SpectralBasis::build(&m, &cpl, lambda).unwrap();
        assert!(b.phi0.distance(&-CMatrix::identity(2)) < 1e-14);
        assert!(b.psi0.distance(&-CMatrix::identity(2)) < 1e-14);
        let (m, cpl) = single(2, neumann_boundary(2));
        let b = SpectralBasis::build(&m, &cpl, lambda).unwrap();
        assert!(b.phi0.distance(&CMatrix::identity(2).scale(c(0.0, lambda))) < 1e-13);
        assert!(b.psi0.distance(&CMatrix::identity(2).scale(c(0.0, -lambda))) < 1e-13);
    }

    #[test]
    fn dirichlet_reduces_to_sine_kernel() {
        let (m, cpl) = single(2, dirichlet_boundary(2));
        for &lambda in &[0.1, 1.0, 7.5, 50.0] {
            let b = SpectralBasis::build(&m, &cpl, lambda).unwrap();
            for &x in &[0.0, 0.3, 2.0, 10.0] {
                let u = CMatrix::identity(2).scale(c(0.0, -2.0 * (lambda * x).sin()));
                let us = CMatrix::identity(2).scale_real((lambda * x).sin() / lambda);
                assert!(b.spectral_u(x).distance(&u) < 1e-12);
                assert!(b.dual_u(x).distance(&us) < 1e-12);
            }
        }
    }

    #[test]
    fn transparent_interface_continues_analytically() {
        let layer = (CMatrix::from_real_diag(&[2.0, 1.0]), CMatrix::from_real_diag(&[0.5, 0.0]));
        let two = MediumStack::new(2, vec![0.0, 1.0], vec![layer.clone(), layer.clone()]).unwrap();
        let one = MediumStack::new(2, vec![0.0], vec![layer]).unwrap();
        let c2 = CouplingSet::new(2, dirichlet_boundary(2), vec![transparent_interface(2)]).unwrap();
        let c1 = CouplingSet::new(2, dirichlet_boundary(2), vec![]).unwrap();
        let b2 = SpectralBasis::build(&two, &c2, 1.1).unwrap();
        let b1 = SpectralBasis::build(&one, &c1, 1.1).unwrap();
        // the single-layer tail is anchored at l0 = 0 and equals the global plane wave
        for &x in &[0.2, 0.9, 1.3, 4.0] {
            assert!(b2.phi[0].eval(x).distance(&b1.phi[0].eval(x)) < 1e-12);
            assert!(b2.spectral_u(x).distance(&b1.spectral_u(x)) < 1e-12);
            assert!(b2.dual_u(x).distance(&b1.dual_u(x)) < 1e-12);
        }
    }

    #[test]
    fn scalar_transfer_matches_two_media_formula() {
        // scalar components: c1 = 1 on (0, 1), c2 = 2 on (1, inf); continuity of y and y'
        let left = (CMatrix::from_real_diag(&[1.0, 1.0]), CMatrix::zeros(2, 2));
        let right = (CMatrix::from_real_diag(&[4.0, 9.0]), CMatrix::zeros(2, 2));
        let m = MediumStack::new(2, vec![0.0, 1.0], vec![left, right]).unwrap();
        let cpl = CouplingSet::new(2, dirichlet_boundary(2), vec![transparent_interface(2)]).unwrap();
        let lambda = 1.4;
        let b = SpectralBasis::build(&m, &cpl, lambda).unwrap();
        for (comp, speed) in [(0, 2.0f64), (1, 3.0f64)] {
            let k1 = lambda;
            let k2 = lambda / speed;
            // e^{i k2 x} continued into x < 1 as a e^{i k1 (x-1)} + b e^{-i k1 (x-1)}
            let at = C64::new(0.0, k2).exp();
            let a = 0.5 * at * (1.0 + k2 / k1);
            let bb = 0.5 * at * (1.0 - k2 / k1);
            let x = 0.37;
            let expect = a * C64::new(0.0, k1 * (x - 1.0)).exp() + bb * C64::new(0.0, -k1 * (x - 1.0)).exp();
            assert!((b.phi[0].eval(x).get(comp, comp) - expect).norm() < 1e-12);
            assert!(b.phi[0].eval(x).get(comp, 1 - comp).norm() < 1e-14);
        }
    }

    #[test]
    fn dual_forms_agree_and_omega_inverts() {
        let m = MediumStack::new(
            2,
            vec![0.0, 0.7, 1.6],
            vec![
                (CMatrix::from_real_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(), CMatrix::from_real_diag(&[0.1, 0.4])),
                (CMatrix::from_real_diag(&[1.0, 3.0]), CMatrix::zeros(2, 2)),
                (CMatrix::from_real_diag(&[1.5, 0.5]), CMatrix::from_real_diag(&[0.2, 0.0])),
            ],
        )
        .unwrap();
        let ics = vec![flux_continuity(m.layer(1), m.layer(2)), flux_continuity(m.layer(2), m.layer(3))];
        let mut bc = neumann_boundary(2);
        bc.beta = CMatrix::from_diag(&[c(0.5, 0.0), c(0.0, 0.3)]);
        let cpl = CouplingSet::new(2, bc, ics).unwrap();
        let b = SpectralBasis::build(&m, &cpl, 0.9).unwrap();
        for &x in &[0.1, 0.69, 1.0, 2.5, 9.0] {
            let direct = b.dual_u_direct(&m, x).unwrap();
            assert!(b.dual_u(x).distance(&direct) < 1e-11 * direct.frobenius_norm().max(1.0));
            let layer = m.layer_of(x);
            let om = b.omega(layer, x);
            assert!((&om.inverse().unwrap() * &om).distance(&CMatrix::identity(4)) < 1e-12);
        }
        let res = basis_residuals(&b, &m, &cpl);
        assert!(res.interface < 1e-12 && res.dual_interface < 1e-10 && res.boundary < 1e-12, "{res:?}");
    }

    #[test]
    fn singular_interface_is_reported() {
        let m = MediumStack::new(1, vec![0.0, 1.0], vec![(CMatrix::identity(1), CMatrix::zeros(1, 1)); 2]).unwrap();
        let z = ConditionQuad::zeros(1);
        let ic = InterfaceCoupling { conditions: [[z.clone(), z.clone()], [z.clone(), z]] };
        let cpl = CouplingSet::new(1, dirichlet_boundary(1), vec![ic]).unwrap();
        assert!(matches!(SpectralBasis::build(&m, &cpl, 1.0), Err(SpectralError::SingularInterface { interface: 1, .. })));
    }

    #[test]
    fn spectrum_csv_shape() {
        let (m, cpl) = single(1, dirichlet_boundary(1));
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &m, &cpl, &[1.0, 2.0], &[0.0, 0.5, 1.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "lambda,layer,x,re_u_11,im_u_11,re_ustar_11,im_ustar_11");
    }
}
