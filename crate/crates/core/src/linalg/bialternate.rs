use super::DenseMatrix;
use crate::error::LinalgError;

/// Position of the multi-index `(p, q)`, `p > q`, zero-based, in the
/// ordering `p = 1..n`, `q = 0..p` (outer loop over `p`).
#[inline]
pub fn pair_index(p: usize, q: usize) -> usize {
    debug_assert!(q < p);
    p * (p - 1) / 2 + q
}

/// The bialternate matrix `2A ⊙ Iₙ` of size `m = n(n−1)/2`.
///
/// Its eigenvalues are the pairwise sums `λᵢ + λⱼ` (`i > j`) of the
/// eigenvalues of `A`, so its determinant vanishes when `A` has a pair of
/// eigenvalues summing to zero (purely imaginary pair or neutral saddle).
pub fn bialternate(a: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n < 2 {
        return Err(LinalgError::DimensionTooSmall(n));
    }
    let m = n * (n - 1) / 2;
    let mut out = DenseMatrix::zeros(m, m);
    for p in 1..n {
        for q in 0..p {
            let row = pair_index(p, q);
            for r in 1..n {
                for s in 0..r {
                    let v = if r == q {
                        -a[(p, s)]
                    } else if r != p && s == q {
                        a[(p, r)]
                    } else if r == p && s == q {
                        a[(p, p)] + a[(q, q)]
                    } else if r == p {
                        a[(q, s)]
                    } else if s == p {
                        -a[(q, r)]
                    } else {
                        0.0
                    };
                    out[(row, pair_index(r, s))] = v;
                }
            }
        }
    }
    Ok(out)
}
