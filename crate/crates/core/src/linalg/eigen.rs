use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::DMatrix;

use super::{CMatrix, LinalgError, C64};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 500;
/// Eigenbases worse conditioned than this are treated as defective.
const MAX_BASIS_CONDITION: f64 = 1e10;

/// Eigendecomposition `M = V diag(values) V^{-1}` of a diagonalizable matrix.
///
/// Matrix functions are evaluated as `V f(diag) V^{-1}`, which is exact up to
/// the conditioning of `V` and adequate for the small blocks used here.
#[derive(Clone, Debug)]
pub struct Diagonalized {
    values: Vec<C64>,
    vectors: CMatrix,
    inverse: CMatrix,
}

impl Diagonalized {
    pub fn new(m: &CMatrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare(m.shape()));
        }
        if !m.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
        if m.is_hermitian(1e-14 * scale) {
            Self::hermitian(m)
        } else {
            Self::general(m)
        }
    }

    fn hermitian(m: &CMatrix) -> Result<Self, LinalgError> {
        // symmetrize exactly so the solver sees a Hermitian input
        let h = (m.inner() + m.inner().adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::try_new(h, SCHUR_EPS, SCHUR_MAX_ITER)
            .ok_or(LinalgError::NonDiagonalizable)?;
        let values = eig.eigenvalues.iter().map(|&v| C64::new(v, 0.0)).collect();
        let vectors = CMatrix::from_inner(eig.eigenvectors);
        let inverse = vectors.adjoint();
        Ok(Diagonalized { values, vectors, inverse })
    }

    fn general(m: &CMatrix) -> Result<Self, LinalgError> {
        let n = m.dim();
        let schur = Schur::try_new(m.inner().clone(), SCHUR_EPS, SCHUR_MAX_ITER)
            .ok_or(LinalgError::NonDiagonalizable)?;
        let (q, t) = schur.unpack();
        let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let smallnum = f64::MIN_POSITIVE * (n as f64) / f64::EPSILON;

        // eigenvectors of the triangular factor by back substitution
        let mut y = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            let tkk = t[(k, k)];
            let smin = (f64::EPSILON * tkk.norm()).max(f64::EPSILON * tnorm * 1e-3).max(smallnum);
            y[(k, k)] = C64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let s: C64 = ((j + 1)..=k).map(|l| t[(j, l)] * y[(l, k)]).sum();
                let mut d = t[(j, j)] - tkk;
                if d.norm() < smin {
                    d = C64::new(smin, 0.0);
                }
                y[(j, k)] = -s / d;
            }
        }
        let mut v = q * y;
        for k in 0..n {
            let norm = v.column(k).norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(LinalgError::NonDiagonalizable);
            }
            v.column_mut(k).unscale_mut(norm);
        }
        let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
        let vectors = CMatrix::checked(v).map_err(|_| LinalgError::NonDiagonalizable)?;
        let inverse = vectors.inverse().map_err(|_| LinalgError::NonDiagonalizable)?;
        let cond = vectors.frobenius_norm() * inverse.frobenius_norm() / n as f64;
        if !(cond < MAX_BASIS_CONDITION) {
            return Err(LinalgError::NonDiagonalizable);
        }
        Ok(Diagonalized { values, vectors, inverse })
    }

    /// Builds a decomposition from a known basis and eigenvalues.
    pub fn from_parts(values: Vec<C64>, vectors: CMatrix, inverse: CMatrix) -> Self {
        Diagonalized { values, vectors, inverse }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Same eigenbasis with every eigenvalue mapped through `f`.
    pub fn map_values(&self, f: impl Fn(C64) -> C64) -> Diagonalized {
        Diagonalized {
            values: self.values.iter().map(|&v| f(v)).collect(),
            vectors: self.vectors.clone(),
            inverse: self.inverse.clone(),
        }
    }

    /// `V f(diag) V^{-1}`.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> CMatrix {
        let fd: Vec<C64> = self.values.iter().map(|&v| f(v)).collect();
        &self.vectors * &self.inverse.scale_rows(&fd)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|v| v)
    }

    /// `exp(i M x)`.
    pub fn exp_i(&self, x: f64) -> CMatrix {
        self.apply(|k| (C64::new(0.0, x) * k).exp())
    }

    /// Smallest eigenvalue modulus.
    pub fn min_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Estimate of `cond(V)` in the scaled Frobenius norm.
    pub fn basis_condition(&self) -> f64 {
        self.vectors.frobenius_norm() * self.inverse.frobenius_norm() / self.dim() as f64
    }
}

/// Principal square root together with its eigenbasis.
///
/// Every eigenvalue of the root has non-negative real part. A Hermitian
/// positive semi-definite input may carry eigenvalues down to `-1e-12 * |M|`,
/// which are clamped to zero; [`SquareRoot::rank_deficient`] reports that case.
#[derive(Clone, Debug)]
pub struct SquareRoot {
    pub root: Diagonalized,
    pub rank_deficient: bool,
}

pub fn sqrt_diagonalized(m: &CMatrix) -> Result<SquareRoot, LinalgError> {
    let diag = Diagonalized::new(m)?;
    let scale = m.frobenius_norm();
    let tol = 1e-12 * scale;
    let hermitian = m.is_hermitian(1e-14 * scale.max(f64::MIN_POSITIVE));
    let mut rank_deficient = false;
    for v in diag.values() {
        let on_negative_axis = v.re < 0.0 && v.im.abs() <= tol;
        if on_negative_axis {
            if hermitian && v.re >= -tol {
                rank_deficient = true;
            } else if v.norm() > tol {
                return Err(LinalgError::NegativeRealEigenvalue { value: *v });
            }
        }
        if v.norm() <= tol {
            rank_deficient = true;
        }
    }
    let root = diag.map_values(|v| {
        if v.re < 0.0 && v.im.abs() <= tol && v.re >= -tol {
            C64::new(0.0, 0.0)
        } else {
            v.sqrt()
        }
    });
    if rank_deficient {
        log::debug!("principal_sqrt: singular or semi-definite input, eigenvalues {:?}", diag.values());
    }
    Ok(SquareRoot { root, rank_deficient })
}

/// Principal square root `S` with `S * S = M`.
pub fn principal_sqrt(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    Ok(sqrt_diagonalized(m)?.root.reconstruct())
}

/// `exp(i q x)` through the eigendecomposition of `q`.
pub fn exp_iqx(q: &CMatrix, x: f64) -> Result<CMatrix, LinalgError> {
    if !x.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    Ok(Diagonalized::new(q)?.exp_i(x))
}
