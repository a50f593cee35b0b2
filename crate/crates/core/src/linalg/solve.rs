use super::{CMatrix, LinalgError, C64};

/// Relative pivot threshold below which a system is reported singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn block_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let n = a.nrows();
    if b.nrows() != n {
        return Err(LinalgError::DimensionMismatch { expected: (n, b.ncols()), found: b.shape() });
    }
    let m = b.ncols();
    let threshold = PIVOT_TOLERANCE * a.frobenius_norm();
    let mut lu = a.inner().clone();
    let mut x = b.inner().clone();

    for col in 0..n {
        let (p, pivot_abs) = (col..n)
            .map(|i| (i, lu[(i, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_abs > threshold) {
            return Err(LinalgError::SingularSystem { column: col, pivot: pivot_abs, threshold });
        }
        if p != col {
            lu.swap_rows(p, col);
            x.swap_rows(p, col);
        }
        let pivot = lu[(col, col)];
        for i in (col + 1)..n {
            let factor = lu[(i, col)] / pivot;
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = lu[(col, j)];
                lu[(i, j)] -= factor * v;
            }
            for j in 0..m {
                let v = x[(col, j)];
                x[(i, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..m {
            let mut s = x[(col, j)];
            for k in (col + 1)..n {
                s -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = s / pivot;
        }
    }
    CMatrix::checked(x)
}

/// Determinant by the same elimination; zero for numerically singular input.
pub fn determinant(a: &CMatrix) -> C64 {
    assert!(a.is_square());
    let n = a.nrows();
    let mut lu = a.inner().clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let (p, pivot_abs) = (col..n)
            .map(|i| (i, lu[(i, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != col {
            lu.swap_rows(p, col);
            det = -det;
        }
        let pivot = lu[(col, col)];
        det *= pivot;
        for i in (col + 1)..n {
            let factor = lu[(i, col)] / pivot;
            for j in col..n {
                let v = lu[(col, j)];
                lu[(i, j)] -= factor * v;
            }
        }
    }
    det
}
