//! Small dense complex linear algebra: principal square roots, `exp(i q x)`,
//! pivoted block solves, and the Bessel function `J0`.
//!
//! Everything here works on `r x r` and `2r x 2r` blocks with `r` in the single
//! digits, so matrix functions go through an explicit eigendecomposition.

mod bessel;
mod eigen;
mod matrix;
mod solve;

use thiserror::Error;

pub use bessel::bessel_j0;
pub use eigen::{exp_iqx, principal_sqrt, sqrt_diagonalized, Diagonalized, SquareRoot};
pub use matrix::{vec_norm, CMatrix};
pub use solve::{block_solve, determinant, PIVOT_TOLERANCE};

pub type C64 = num_complex::Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not diagonalizable (eigen-solver failure or defective eigenbasis)")]
    NonDiagonalizable,
    #[error("eigenvalue {value} lies on the negative real axis; principal branch undefined")]
    NegativeRealEigenvalue { value: C64 },
    #[error("singular system: pivot {pivot:e} below {threshold:e} in column {column}")]
    SingularSystem { column: usize, pivot: f64, threshold: f64 },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("non-finite matrix entry")]
    NonFinite,
}
