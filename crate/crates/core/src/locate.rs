//! Newton's method on the extended systems that characterise limit points
//! and Hopf points.
//!
//! Limit point, unknowns `(λ, u, h)` in `ℝ^{2n+1}`:
//!
//! ```text
//! F(λ, u) = 0,   D_uF·h = 0,   h_k = 1
//! ```
//!
//! Hopf point, unknowns `(λ, β, u, h, g)` in `ℝ^{3n+2}`:
//!
//! ```text
//! F = 0,   D_uF·h + β g = 0,   D_uF·g − β h = 0,   h_k = 1,   g_k = 0
//! ```
//!
//! so that `D_uF·(h + i g) = iβ·(h + i g)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::detect::{BifurcationEvent, EventKind};
use crate::error::{Error, LinalgError};
use crate::linalg::{eigenvalues, lu_factor, norm_inf, DenseMatrix};
use crate::system::{check_dim, System};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocateSettings {
    /// Newton stops once the extended residual satisfies `‖·‖∞ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LocateSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 25,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub lambda: f64,
    pub u: Vec<f64>,
    /// Null vector of `D_uF`, scaled so that `h[k] = 1`.
    pub h: Vec<f64>,
    pub k: usize,
    pub iterations: usize,
    pub residual: f64,
    /// `‖G‖∞` before each Newton update and at the end.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopfSolution {
    pub lambda: f64,
    /// Angular frequency, always positive.
    pub beta: f64,
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub k: usize,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

impl HopfSolution {
    /// Period `2π/β` of the emerging oscillation.
    pub fn period(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.beta
    }
}

/// `D²_uF(λ, u)[h, ·]`, the Jacobian of `u ↦ D_uF(λ, u)·h`.
pub fn second_directional_derivative<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u: &[f64],
    h: &[f64],
) -> Result<DenseMatrix, Error> {
    check_dim(sys, u)?;
    check_dim(sys, h)?;
    sys.second_directional(lambda, u, h)
}

/// The limit-point residual `G(λ, u, h)`.
pub fn fold_residual<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u: &[f64],
    h: &[f64],
    k: usize,
) -> Result<Vec<f64>, Error> {
    let mut g = sys.eval(lambda, u)?;
    g.extend(sys.jac_u(lambda, u)?.mul_vec(h));
    g.push(h[k] - 1.0);
    Ok(g)
}

/// The Hopf residual `H(λ, β, u, h, g)`.
#[allow(clippy::too_many_arguments)]
pub fn hopf_residual<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    beta: f64,
    u: &[f64],
    h: &[f64],
    g: &[f64],
    k: usize,
) -> Result<Vec<f64>, Error> {
    let jac = sys.jac_u(lambda, u)?;
    let jh = jac.mul_vec(h);
    let jg = jac.mul_vec(g);
    let mut r = sys.eval(lambda, u)?;
    r.extend(jh.iter().zip(g).map(|(a, b)| a + beta * b));
    r.extend(jg.iter().zip(h).map(|(a, b)| a - beta * b));
    r.push(h[k] - 1.0);
    r.push(g[k]);
    Ok(r)
}

fn solve_extended(m: &DenseMatrix, rhs: &[f64], k: usize) -> Result<Vec<f64>, Error> {
    match lu_factor(m) {
        Ok(lu) => Ok(lu.solve(rhs)?),
        Err(LinalgError::SingularMatrix { .. }) => Err(Error::SingularExtendedJacobian { index: k }),
        Err(e) => Err(e.into()),
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut k = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[k].abs() {
            k = i;
        }
    }
    k
}

/// Newton on `G` from an explicit initial guess.
pub fn locate_lp_from<S: System + ?Sized>(
    sys: &S,
    lambda0: f64,
    u0: &[f64],
    h0: &[f64],
    k: usize,
    settings: &LocateSettings,
) -> Result<LpSolution, Error> {
    check_dim(sys, u0)?;
    check_dim(sys, h0)?;
    let n = sys.dim();
    if k >= n {
        return Err(Error::InvalidSettings("normalization index out of range"));
    }
    let (mut lambda, mut u, mut h) = (lambda0, u0.to_vec(), h0.to_vec());
    let mut history = Vec::new();
    for iteration in 0..=settings.max_iter {
        let r = fold_residual(sys, lambda, &u, &h, k)?;
        let res = norm_inf(&r);
        history.push(res);
        if res <= settings.tol {
            return Ok(LpSolution {
                lambda,
                u,
                h,
                k,
                iterations: iteration,
                residual: res,
                history,
            });
        }
        if iteration == settings.max_iter || !res.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: res,
            });
        }

        // columns: λ | u | h
        let jac = sys.jac_u(lambda, &u)?;
        let fl = sys.jac_lambda(lambda, &u)?;
        let sh = sys.second_directional(lambda, &u, &h)?;
        let mh = sys.mixed_lambda(lambda, &u, &h)?;
        let mut m = DenseMatrix::zeros(2 * n + 1, 2 * n + 1);
        for i in 0..n {
            m[(i, 0)] = fl[i];
            m[(n + i, 0)] = mh[i];
        }
        m.set_block(0, 1, &jac);
        m.set_block(n, 1, &sh);
        m.set_block(n, 1 + n, &jac);
        m[(2 * n, 1 + n + k)] = 1.0;
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let d = solve_extended(&m, &rhs, k)?;
        lambda += d[0];
        for i in 0..n {
            u[i] += d[1 + i];
            h[i] += d[1 + n + i];
        }
    }
    unreachable!()
}

/// Refines a [`EventKind::LimitPoint`] event.
///
/// Starts from the best endpoint with `h = e₁`, `k = 0`. If that fails,
/// retries with `h` an approximate null vector of `D_uF` and `k` its
/// largest component.
pub fn locate_lp<S: System + ?Sized>(
    sys: &S,
    event: &BifurcationEvent,
    settings: &LocateSettings,
) -> Result<LpSolution, Error> {
    if event.kind != EventKind::LimitPoint {
        return Err(Error::WrongEventKind {
            expected: EventKind::LimitPoint,
            got: event.kind,
        });
    }
    let p = event.best_point();
    let n = sys.dim();
    let mut h0 = vec![0.0; n];
    h0[0] = 1.0;
    match locate_lp_from(sys, p.lambda, &p.u, &h0, 0, settings) {
        Ok(sol) => Ok(sol),
        Err(first) => {
            let jac = sys.jac_u(p.lambda, &p.u)?;
            let z = approximate_null_vector(&jac).ok_or(first)?;
            let k = argmax_abs(&z);
            let h0: Vec<f64> = z.iter().map(|x| x / z[k]).collect();
            locate_lp_from(sys, p.lambda, &p.u, &h0, k, settings)
        }
    }
}

/// Two steps of inverse iteration on a slightly shifted matrix.
fn approximate_null_vector(jac: &DenseMatrix) -> Option<Vec<f64>> {
    let n = jac.nrows();
    let mut shifted = jac.clone();
    let shift = 1e-10 * jac.max_abs().max(1.0);
    for i in 0..n {
        shifted[(i, i)] += shift;
    }
    let lu = lu_factor(&shifted).ok()?;
    let mut z = vec![1.0; n];
    for _ in 0..2 {
        z = lu.solve(&z).ok()?;
        let s = norm_inf(&z);
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        z.iter_mut().for_each(|x| *x /= s);
    }
    Some(z)
}

/// Newton on `H` from an explicit initial guess.
#[allow(clippy::too_many_arguments)]
pub fn locate_hopf_from<S: System + ?Sized>(
    sys: &S,
    lambda0: f64,
    beta0: f64,
    u0: &[f64],
    h0: &[f64],
    g0: &[f64],
    k: usize,
    settings: &LocateSettings,
) -> Result<HopfSolution, Error> {
    check_dim(sys, u0)?;
    check_dim(sys, h0)?;
    check_dim(sys, g0)?;
    let n = sys.dim();
    if k >= n {
        return Err(Error::InvalidSettings("normalization index out of range"));
    }
    let (mut lambda, mut beta) = (lambda0, beta0);
    let (mut u, mut h, mut g) = (u0.to_vec(), h0.to_vec(), g0.to_vec());
    let mut history = Vec::new();
    let size = 3 * n + 2;
    for iteration in 0..=settings.max_iter {
        let r = hopf_residual(sys, lambda, beta, &u, &h, &g, k)?;
        let res = norm_inf(&r);
        history.push(res);
        if res <= settings.tol {
            if beta < 0.0 {
                beta = -beta;
                g.iter_mut().for_each(|x| *x = -*x);
            }
            return Ok(HopfSolution {
                lambda,
                beta,
                u,
                h,
                g,
                k,
                iterations: iteration,
                residual: res,
                history,
            });
        }
        if iteration == settings.max_iter || !res.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: res,
            });
        }

        // columns: λ | β | u | h | g
        let (cu, ch, cg) = (2, 2 + n, 2 + 2 * n);
        let jac = sys.jac_u(lambda, &u)?;
        let fl = sys.jac_lambda(lambda, &u)?;
        let sh = sys.second_directional(lambda, &u, &h)?;
        let sg = sys.second_directional(lambda, &u, &g)?;
        let mh = sys.mixed_lambda(lambda, &u, &h)?;
        let mg = sys.mixed_lambda(lambda, &u, &g)?;
        let mut m = DenseMatrix::zeros(size, size);
        for i in 0..n {
            m[(i, 0)] = fl[i];
            m[(n + i, 0)] = mh[i];
            m[(n + i, 1)] = g[i];
            m[(n + i, cg + i)] = beta;
            m[(2 * n + i, 0)] = mg[i];
            m[(2 * n + i, 1)] = -h[i];
            m[(2 * n + i, ch + i)] = -beta;
        }
        m.set_block(0, cu, &jac);
        m.set_block(n, cu, &sh);
        m.set_block(n, ch, &jac);
        m.set_block(2 * n, cu, &sg);
        m.set_block(2 * n, cg, &jac);
        m[(3 * n, ch + k)] = 1.0;
        m[(3 * n + 1, cg + k)] = 1.0;
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let d = solve_extended(&m, &rhs, k)?;
        lambda += d[0];
        beta += d[1];
        for i in 0..n {
            u[i] += d[cu + i];
            h[i] += d[ch + i];
            g[i] += d[cg + i];
        }
    }
    unreachable!()
}

/// Refines a [`EventKind::HopfCandidate`] event.
///
/// `β⁰` is the imaginary part of the crossing eigenvalue at the best
/// endpoint. The first attempt uses `h = e₁`, `g = 0`, `k = 0`; on failure
/// the initial `h + i g` is an approximate eigenvector for `iβ⁰` normalized
/// at its largest component.
pub fn locate_hopf<S: System + ?Sized>(
    sys: &S,
    event: &BifurcationEvent,
    settings: &LocateSettings,
) -> Result<HopfSolution, Error> {
    if event.kind != EventKind::HopfCandidate {
        return Err(Error::WrongEventKind {
            expected: EventKind::HopfCandidate,
            got: event.kind,
        });
    }
    let p = event.best_point();
    let n = sys.dim();
    let beta0 = match event.crossing_frequency() {
        Some(b) => b,
        None => eigenvalues(&sys.jac_u(p.lambda, &p.u)?)?
            .upper_complex(0.0)
            .min_by(|a, b| a.re.abs().total_cmp(&b.re.abs()))
            .map(|z| z.im)
            .ok_or(Error::WrongEventKind {
                expected: EventKind::HopfCandidate,
                got: EventKind::NeutralSaddle,
            })?,
    };
    let mut h0 = vec![0.0; n];
    h0[0] = 1.0;
    let g0 = vec![0.0; n];
    match locate_hopf_from(sys, p.lambda, beta0, &p.u, &h0, &g0, 0, settings) {
        Ok(sol) => Ok(sol),
        Err(first) => {
            let jac = sys.jac_u(p.lambda, &p.u)?;
            let (h0, g0, k) = approximate_eigenvector(&jac, beta0).ok_or(first)?;
            locate_hopf_from(sys, p.lambda, beta0, &p.u, &h0, &g0, k, settings)
        }
    }
}

/// Inverse iteration for `(J − iβ)z ≈ 0` in real form, returning `h`, `g`
/// and `k` with `h[k] = 1`, `g[k] = 0`.
fn approximate_eigenvector(jac: &DenseMatrix, beta: f64) -> Option<(Vec<f64>, Vec<f64>, usize)> {
    let n = jac.nrows();
    // [J  β; −β  J] [x; y] = [b; c]  ⇔  (J − iβ)(x + iy) = b + ic
    let b = beta * (1.0 + 1e-8);
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    m.set_block(0, 0, jac);
    m.set_block(n, n, jac);
    for i in 0..n {
        m[(i, n + i)] = b;
        m[(n + i, i)] = -b;
    }
    let lu = lu_factor(&m).ok()?;
    let mut z = vec![1.0; 2 * n];
    for _ in 0..2 {
        z = lu.solve(&z).ok()?;
        let s = norm_inf(&z);
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        z.iter_mut().for_each(|x| *x /= s);
    }
    let (x, y) = z.split_at(n);
    let mut k = 0;
    let mut best = 0.0;
    for i in 0..n {
        let m2 = x[i] * x[i] + y[i] * y[i];
        if m2 > best {
            best = m2;
            k = i;
        }
    }
    // (x + iy)/(x_k + iy_k)
    let (xr, yi) = (x[k] / best, -y[k] / best);
    let h = (0..n).map(|i| x[i] * xr - y[i] * yi).collect::<Vec<_>>();
    let mut g = (0..n).map(|i| x[i] * yi + y[i] * xr).collect::<Vec<_>>();
    g[k] = 0.0;
    Some((h, g, k))
}
