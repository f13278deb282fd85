//! Parameterized vector fields `F(λ, u)`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::DenseMatrix;

/// Relative step for the finite-difference Jacobians.
pub const FD_STEP: f64 = 1e-6;

/// A one-parameter family of vector fields `du/dt = F(λ, u)` on `Rⁿ`.
///
/// Only [`System::eval`] is required. The derivative methods default to
/// central finite differences; models with analytic derivatives override
/// them.
pub trait System {
    fn dim(&self) -> usize;

    fn name(&self) -> &str;

    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error>;

    /// `D_uF(λ, u)`.
    fn jac_u(&self, lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
        fd_jac_u(self, lambda, u)
    }

    /// `∂F/∂λ(λ, u)`.
    fn jac_lambda(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        fd_jac_lambda(self, lambda, u)
    }

    /// `D_u(D_uF·h)`: entry `(i, l)` is `Σⱼ ∂²Fᵢ/∂uⱼ∂u_l · hⱼ`.
    fn second_directional(&self, lambda: f64, u: &[f64], h: &[f64]) -> Result<DenseMatrix, Error> {
        fd_second_directional(self, lambda, u, h)
    }

    /// `∂(D_uF·h)/∂λ`.
    fn mixed_lambda(&self, lambda: f64, u: &[f64], h: &[f64]) -> Result<Vec<f64>, Error> {
        fd_mixed_lambda(self, lambda, u, h)
    }

    /// Typical magnitude of each state component, used to scale
    /// finite-difference steps. Defaults to 1.
    fn state_scale(&self) -> Vec<f64> {
        alloc::vec![1.0; self.dim()]
    }
}

impl<S: System + ?Sized> System for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        (**self).eval(lambda, u)
    }
    fn jac_u(&self, lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
        (**self).jac_u(lambda, u)
    }
    fn jac_lambda(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        (**self).jac_lambda(lambda, u)
    }
    fn second_directional(&self, lambda: f64, u: &[f64], h: &[f64]) -> Result<DenseMatrix, Error> {
        (**self).second_directional(lambda, u, h)
    }
    fn mixed_lambda(&self, lambda: f64, u: &[f64], h: &[f64]) -> Result<Vec<f64>, Error> {
        (**self).mixed_lambda(lambda, u, h)
    }
    fn state_scale(&self) -> Vec<f64> {
        (**self).state_scale()
    }
}

/// Wraps a system so that every derivative comes from finite differences
/// of its `eval`, ignoring analytic overrides.
#[derive(Clone, Debug)]
pub struct FiniteDifferences<S>(pub S);

impl<S: System> System for FiniteDifferences<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn name(&self) -> &str {
        self.0.name()
    }
    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        self.0.eval(lambda, u)
    }
    fn state_scale(&self) -> Vec<f64> {
        self.0.state_scale()
    }
}

pub(crate) fn check_dim<S: System + ?Sized>(sys: &S, u: &[f64]) -> Result<(), Error> {
    if u.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: u.len(),
        });
    }
    Ok(())
}

fn fd_step(x: f64, scale: f64) -> f64 {
    FD_STEP * x.abs().max(scale)
}

/// Central-difference `D_uF` with per-component steps `1e-6·max(|uⱼ|, scaleⱼ)`.
pub fn fd_jac_u<S: System + ?Sized>(sys: &S, lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
    check_dim(sys, u)?;
    let n = sys.dim();
    let scale = sys.state_scale();
    let mut jac = DenseMatrix::zeros(n, n);
    let mut x = u.to_vec();
    for j in 0..n {
        let h = fd_step(u[j], scale[j]);
        x[j] = u[j] + h;
        let fp = sys.eval(lambda, &x)?;
        x[j] = u[j] - h;
        let fm = sys.eval(lambda, &x)?;
        x[j] = u[j];
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

pub fn fd_jac_lambda<S: System + ?Sized>(sys: &S, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
    check_dim(sys, u)?;
    let h = fd_step(lambda, 1.0);
    let fp = sys.eval(lambda + h, u)?;
    let fm = sys.eval(lambda - h, u)?;
    Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// Relative step of the four-point mixed-difference stencils.
pub const FD_STEP_2: f64 = 1e-4;

/// Largest step `a` with `a·|hᵢ| ≤ FD_STEP_2·max(|uᵢ|, scaleᵢ)` for every `i`.
fn directional_step(u: &[f64], h: &[f64], scale: &[f64]) -> f64 {
    let mut a = f64::INFINITY;
    for i in 0..u.len() {
        if h[i] != 0.0 {
            a = a.min(FD_STEP_2 * u[i].abs().max(scale[i]) / h[i].abs());
        }
    }
    a
}

/// Four-point mixed difference `∂²F/∂a∂b ≈ [F(++) − F(+−) − F(−+) + F(−−)]/(4ab)`.
fn mixed_stencil<G>(n: usize, a: f64, b: f64, mut eval: G) -> Result<Vec<f64>, Error>
where
    G: FnMut(f64, f64) -> Result<Vec<f64>, Error>,
{
    let pp = eval(a, b)?;
    let pm = eval(a, -b)?;
    let mp = eval(-a, b)?;
    let mm = eval(-a, -b)?;
    Ok((0..n).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * a * b)).collect())
}

/// `D²_uF[h, ·]` by mixed differences of `F` along `h` and each `eⱼ`.
pub fn fd_second_directional<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u: &[f64],
    h: &[f64],
) -> Result<DenseMatrix, Error> {
    check_dim(sys, u)?;
    check_dim(sys, h)?;
    let n = sys.dim();
    let mut out = DenseMatrix::zeros(n, n);
    if h.iter().all(|x| *x == 0.0) {
        return Ok(out);
    }
    let scale = sys.state_scale();
    let a = directional_step(u, h, &scale);
    let mut x = u.to_vec();
    for j in 0..n {
        let b = FD_STEP_2 * u[j].abs().max(scale[j]);
        let col = mixed_stencil(n, a, b, |da, db| {
            for i in 0..n {
                x[i] = u[i] + da * h[i];
            }
            x[j] += db;
            sys.eval(lambda, &x)
        })?;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// `∂(D_uF·h)/∂λ` by mixed differences of `F` along `λ` and `h`.
pub fn fd_mixed_lambda<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u: &[f64],
    h: &[f64],
) -> Result<Vec<f64>, Error> {
    check_dim(sys, u)?;
    check_dim(sys, h)?;
    let n = sys.dim();
    if h.iter().all(|x| *x == 0.0) {
        return Ok(alloc::vec![0.0; n]);
    }
    let a = FD_STEP_2 * lambda.abs().max(1.0);
    let b = directional_step(u, h, &sys.state_scale());
    let mut x = u.to_vec();
    mixed_stencil(n, a, b, |da, db| {
        for i in 0..n {
            x[i] = u[i] + db * h[i];
        }
        sys.eval(lambda + da, &x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// F(λ, u) = (λ·u₀² + u₁, u₀·u₁ − λ³)
    struct Poly;

    impl System for Poly {
        fn dim(&self) -> usize {
            2
        }
        fn name(&self) -> &str {
            "poly"
        }
        fn eval(&self, l: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
            check_dim(self, u)?;
            Ok(vec![l * u[0] * u[0] + u[1], u[0] * u[1] - l * l * l])
        }
    }

    #[test]
    fn finite_difference_defaults() {
        let (l, u) = (0.5, [1.5, -2.0]);
        let j = Poly.jac_u(l, &u).unwrap();
        let want = [[2.0 * l * u[0], 1.0], [u[1], u[0]]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[(i, k)] - want[i][k]).abs() < 1e-8);
            }
        }
        let jl = Poly.jac_lambda(l, &u).unwrap();
        assert!((jl[0] - u[0] * u[0]).abs() < 1e-8);
        assert!((jl[1] + 3.0 * l * l).abs() < 1e-8);

        let h = [0.3, 0.7];
        // D_u(J h): row 0 = (2λh₀, 0), row 1 = (h₁, h₀)
        let s = Poly.second_directional(l, &u, &h).unwrap();
        let want = [[2.0 * l * h[0], 0.0], [h[1], h[0]]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((s[(i, k)] - want[i][k]).abs() < 1e-6, "{s:?}");
            }
        }
        let m = Poly.mixed_lambda(l, &u, &h).unwrap();
        assert!((m[0] - 2.0 * u[0] * h[0]).abs() < 1e-6);
        assert!(m[1].abs() < 1e-6);
    }

    #[test]
    fn dimension_is_checked() {
        assert!(matches!(
            Poly.jac_u(0.0, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }
}
