//! Small systems with closed-form equilibrium curves and bifurcations.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::DenseMatrix;
use crate::system::{check_dim, System};

/// `F(λ, u) = λ − u²`; a fold at `(0, 0)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FoldNormalForm;

/// `F₁ = λu₁ − u₂ − u₁(u₁²+u₂²)`, `F₂ = u₁ + λu₂ − u₂(u₁²+u₂²)`.
///
/// `u = 0` is an equilibrium for every `λ` with eigenvalues `λ ± i`, so a
/// Hopf point sits at `λ = 0` with `β = 1`. Off the origin the polar form
/// is `r' = r(λ − r²)`, `θ' = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HopfNormalForm;

/// `F(λ, u) = u² + λ² − 1`; the equilibrium curve is the unit circle with
/// folds at `(±1, 0)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CircleSystem;

pub fn fold_normal_form() -> FoldNormalForm {
    FoldNormalForm
}

pub fn hopf_normal_form() -> HopfNormalForm {
    HopfNormalForm
}

pub fn circle_system() -> CircleSystem {
    CircleSystem
}

impl System for FoldNormalForm {
    fn dim(&self) -> usize {
        1
    }
    fn name(&self) -> &str {
        "fold_nf"
    }
    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        Ok(vec![lambda - u[0] * u[0]])
    }
    fn jac_u(&self, _lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
        check_dim(self, u)?;
        Ok(DenseMatrix::from_diagonal(&[-2.0 * u[0]]))
    }
    fn jac_lambda(&self, _lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        Ok(vec![1.0])
    }
}

impl System for HopfNormalForm {
    fn dim(&self) -> usize {
        2
    }
    fn name(&self) -> &str {
        "hopf_nf"
    }
    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        let (x, y) = (u[0], u[1]);
        let r2 = x * x + y * y;
        Ok(vec![lambda * x - y - x * r2, x + lambda * y - y * r2])
    }
    fn jac_u(&self, lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
        check_dim(self, u)?;
        let (x, y) = (u[0], u[1]);
        let r2 = x * x + y * y;
        Ok(DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => lambda - r2 - 2.0 * x * x,
            (0, 1) => -1.0 - 2.0 * x * y,
            (1, 0) => 1.0 - 2.0 * x * y,
            _ => lambda - r2 - 2.0 * y * y,
        }))
    }
    fn jac_lambda(&self, _lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        Ok(u.to_vec())
    }
}

impl System for CircleSystem {
    fn dim(&self) -> usize {
        1
    }
    fn name(&self) -> &str {
        "circle"
    }
    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        Ok(vec![u[0] * u[0] + lambda * lambda - 1.0])
    }
    fn jac_u(&self, _lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
        check_dim(self, u)?;
        Ok(DenseMatrix::from_diagonal(&[2.0 * u[0]]))
    }
    fn jac_lambda(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        Ok(vec![2.0 * lambda])
    }
}
