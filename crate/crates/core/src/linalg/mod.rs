//! Dense real linear algebra for small systems (n ≤ 64).

mod bialternate;
mod eigen;
mod lu;
mod matrix;

pub use bialternate::{bialternate, pair_index};
pub use eigen::{eigenvalues, EigenSet, MAX_EIGEN_DIM};
pub use lu::{determinant, lu_factor, lu_solve, LuFactorization, PIVOT_RELATIVE_TOL};
pub use matrix::DenseMatrix;

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}
