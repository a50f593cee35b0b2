use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use super::{LinalgError, C64};

/// Dense complex matrix with finite entries.
///
/// Most matrices in this crate are square `r x r` or `2r x 2r` blocks, but
/// rectangular shapes appear as right-hand sides and row/column stacks, so
/// squareness is checked by the operations that need it.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(d: usize) -> Self {
        CMatrix(DMatrix::identity(d, d))
    }

    /// Builds a matrix from row slices, rejecting ragged input and non-finite entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LinalgError::DimensionMismatch {
                expected: (nrows, ncols),
                found: (nrows, rows.iter().map(Vec::len).max().unwrap_or(0)),
            });
        }
        let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
        Self::checked(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let c: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&c)
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        CMatrix(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) }))
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let c: Vec<C64> = d.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::from_diag(&c)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Wraps an nalgebra matrix after checking that every entry is finite.
    pub fn checked(m: DMatrix<C64>) -> Result<Self, LinalgError> {
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(CMatrix(m))
        } else {
            Err(LinalgError::NonFinite)
        }
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        CMatrix(self.0.map(|z| z.conj()))
    }

    /// Entrywise real part.
    pub fn re(&self) -> nalgebra::DMatrix<f64> {
        self.0.map(|z| z.re)
    }

    /// Entrywise imaginary part as a (real-valued) complex matrix.
    pub fn im_part(&self) -> Self {
        CMatrix(self.0.map(|z| C64::new(z.im, 0.0)))
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.ncols() != rhs.nrows() {
            return Err(LinalgError::DimensionMismatch {
                expected: (self.ncols(), rhs.ncols()),
                found: rhs.shape(),
            });
        }
        Ok(CMatrix(&self.0 * &rhs.0))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.ncols(), v.len(), "matrix-vector dimension mismatch");
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Extracts the `rows x cols` block whose top-left corner is `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> CMatrix {
        CMatrix(self.0.view((i0, j0), (rows, cols)).into_owned())
    }

    /// Assembles `[[a, b], [c, d]]` from four equally-shaped blocks.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
        let (r1, c1) = a.shape();
        let (_, c2) = b.shape();
        let (r2, _) = c.shape();
        assert_eq!(b.nrows(), r1);
        assert_eq!(c.ncols(), c1);
        assert_eq!(d.shape(), (r2, c2));
        let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&a.0);
        m.view_mut((0, c1), (r1, c2)).copy_from(&b.0);
        m.view_mut((r1, 0), (r2, c1)).copy_from(&c.0);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&d.0);
        CMatrix(m)
    }

    /// Stacks `top` above `bottom`.
    pub fn vstack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
        assert_eq!(top.ncols(), bottom.ncols());
        let mut m = DMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
        m.view_mut((0, 0), top.shape()).copy_from(&top.0);
        m.view_mut((top.nrows(), 0), bottom.shape()).copy_from(&bottom.0);
        CMatrix(m)
    }

    /// Places `left` beside `right`.
    pub fn hstack(left: &CMatrix, right: &CMatrix) -> CMatrix {
        assert_eq!(left.nrows(), right.nrows());
        let mut m = DMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
        m.view_mut((0, 0), left.shape()).copy_from(&left.0);
        m.view_mut((0, left.ncols()), right.shape()).copy_from(&right.0);
        CMatrix(m)
    }

    /// Left-multiplies by `diag(d)`, i.e. scales row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[C64]) -> CMatrix {
        let mut m = self.0.clone();
        for (i, &s) in d.iter().enumerate() {
            for z in m.row_mut(i).iter_mut() {
                *z *= s;
            }
        }
        CMatrix(m)
    }

    /// Right-multiplies by `diag(d)`, i.e. scales column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[C64]) -> CMatrix {
        let mut m = self.0.clone();
        for (j, &s) in d.iter().enumerate() {
            for z in m.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        CMatrix(m)
    }

    /// Inverse of a square matrix through [`super::block_solve`].
    pub fn inverse(&self) -> Result<CMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.shape()));
        }
        super::block_solve(self, &CMatrix::identity(self.nrows()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (&self.0 - self.0.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Distance to another matrix in Frobenius norm.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        (self - other).frobenius_norm()
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{:?}[", self.shape())?;
        for i in 0..self.nrows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.ncols() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self.0[(i, j)];
                write!(f, "{:.6e}{:+.6e}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a CMatrix> for &'a CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &'a CMatrix) -> CMatrix {
                CMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: CMatrix) -> CMatrix {
                CMatrix(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &'a CMatrix) -> CMatrix {
                CMatrix(self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-self.0)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
