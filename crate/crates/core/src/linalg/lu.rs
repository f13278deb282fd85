use alloc::vec::Vec;

use super::DenseMatrix;
use crate::error::LinalgError;

/// A pivot is treated as zero when its magnitude falls below this fraction
/// of the largest entry of the input matrix.
pub const PIVOT_RELATIVE_TOL: f64 = 1e-14;

/// `P·A = L·U` with unit-diagonal `L` packed below the diagonal of `lu`.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    lu: DenseMatrix,
    /// `perm[i]` is the row of `A` that ended up in row `i`.
    perm: Vec<usize>,
    parity: f64,
}

/// Doolittle elimination with partial pivoting.
pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactorization, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1.0;
    let threshold = PIVOT_RELATIVE_TOL * a.max_abs();

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        // `!(best > threshold)` also catches the all-zero matrix.
        if !(best > threshold) {
            return Err(LinalgError::SingularMatrix {
                column: k,
                pivot: best,
            });
        }
        if p != k {
            lu.swap_rows(p, k);
            perm.swap(p, k);
            parity = -parity;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                lu[(i, j)] -= factor * ukj;
            }
        }
    }
    Ok(LuFactorization { lu, perm, parity })
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).fold(self.parity, |d, i| d * self.lu[(i, i)])
    }

    /// `+1` for an even number of row swaps, `-1` otherwise.
    pub fn parity(&self) -> f64 {
        self.parity
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            core::cmp::Ordering::Greater => self.lu[(i, j)],
            core::cmp::Ordering::Equal => 1.0,
            core::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { 0.0 })
    }

    /// `P·A`, rebuilt from the factors.
    pub fn reconstruct_permuted(&self) -> DenseMatrix {
        self.lower().matmul(&self.upper())
    }
}

pub fn lu_solve(f: &LuFactorization, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    f.solve(b)
}

/// Determinant via LU; a singular pivot maps to exactly `0.0`. Panics on a
/// non-square matrix.
pub fn determinant(a: &DenseMatrix) -> f64 {
    assert!(a.is_square(), "determinant of a non-square matrix");
    if a.nrows() == 0 {
        return 1.0;
    }
    match lu_factor(a) {
        Ok(f) => f.determinant(),
        Err(LinalgError::SingularMatrix { .. }) => 0.0,
        Err(e) => unreachable!("lu_factor on a square matrix: {e}"),
    }
}
