//! Pseudo-arclength continuation of the equilibrium curve `F(λ, u) = 0`.
//!
//! Starting from a seed equilibrium, each step solves the bordered system
//!
//! ```text
//! F(λ, u)                          = 0
//! t_u·(u − u*) + t_λ·(λ − λ*)      = Δs
//! ```
//!
//! by Newton's method, using the previous point `(λ*, u*)` as the initial
//! iterate. `t` is the unit initial tangent on the first step and the unit
//! secant through the last two accepted points afterwards.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{psi_h_of, psi_lp_of};
use crate::error::{Error, LinalgError};
use crate::linalg::{eigenvalues, lu_factor, norm_inf, DenseMatrix, EigenSet};
use crate::system::{check_dim, System};

/// Eigenvalues with `|Re| ≤ STABILITY_MARGIN` are treated as neutral.
pub const STABILITY_MARGIN: f64 = 1e-8;

/// Required accuracy of the arclength constraint at convergence.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Sign of `dλ/ds` at the seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "i64", into = "i64"))]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

impl TryFrom<i64> for Direction {
    type Error = &'static str;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Direction::Forward),
            -1 => Ok(Direction::Backward),
            _ => Err("direction must be +1 or -1"),
        }
    }
}

impl From<Direction> for i64 {
    fn from(d: Direction) -> i64 {
        d.sign() as i64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationSettings {
    /// Nominal arclength step `Δs`.
    pub ds: f64,
    /// Number of accepted steps after which tracing stops.
    pub max_steps: usize,
    /// Newton stops once `‖F‖∞ ≤ newton_tol`.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub direction: Direction,
    /// Tracing stops at the first accepted point with `λ` outside
    /// `[lambda_min, lambda_max]`.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Halvings of `Δs` allowed for a single step before giving up.
    pub max_halvings: u32,
    /// Consecutive successes at a reduced step before `Δs` is doubled back.
    pub restore_after: u32,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            ds: 0.01,
            max_steps: 1000,
            newton_tol: 1e-9,
            newton_max_iter: 25,
            direction: Direction::Forward,
            lambda_min: -1e3,
            lambda_max: 1e3,
            max_halvings: 8,
            restore_after: 3,
        }
    }
}

impl ContinuationSettings {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.ds > 0.0) || !self.ds.is_finite() {
            return Err(Error::InvalidSettings("ds must be positive"));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidSettings("newton_tol must be positive"));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidSettings("newton_max_iter must be at least 1"));
        }
        if !(self.lambda_min < self.lambda_max) {
            return Err(Error::InvalidSettings("lambda_min must be below lambda_max"));
        }
        Ok(())
    }

    fn in_window(&self, lambda: f64) -> bool {
        lambda >= self.lambda_min && lambda <= self.lambda_max
    }
}

/// A point `(λ, u)` in parameter-state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub lambda: f64,
    pub u: Vec<f64>,
}

/// Unit tangent `(dλ/ds, du/ds)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    pub dlambda: f64,
    pub du: Vec<f64>,
}

impl Tangent {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dlambda * self.dlambda + self.du.iter().map(|x| x * x).sum::<f64>())
    }
}

#[derive(Clone, Debug)]
pub struct ContinuationState {
    /// Accepted steps so far.
    pub step: usize,
    pub current: Point,
    pub previous: Option<Point>,
    /// Direction for the very first step.
    pub tangent0: Tangent,
    /// Step length for the next attempt (may be below the nominal `Δs`).
    pub ds: f64,
    /// Length of the last accepted step.
    pub last_ds: f64,
    successes_at_reduced: u32,
}

impl ContinuationState {
    pub fn new(seed: Point, tangent0: Tangent, ds: f64) -> Self {
        Self {
            step: 0,
            current: seed,
            previous: None,
            tangent0,
            ds,
            last_ds: ds,
            successes_at_reduced: 0,
        }
    }

    /// Unit direction of the constraint row and the relative deviation of
    /// the secant length from the last step length (0 on the first step).
    fn direction(&self) -> (Vec<f64>, f64, f64) {
        match &self.previous {
            None => (self.tangent0.du.clone(), self.tangent0.dlambda, 0.0),
            Some(prev) => {
                let du: Vec<f64> = self.current.u.iter().zip(&prev.u).map(|(a, b)| a - b).collect();
                let dl = self.current.lambda - prev.lambda;
                let norm = libm::sqrt(dl * dl + du.iter().map(|x| x * x).sum::<f64>());
                let deviation = norm / self.last_ds - 1.0;
                (du.iter().map(|x| x / norm).collect(), dl / norm, deviation)
            }
        }
    }
}

/// Result of one corrector solve.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub point: Point,
    pub ds: f64,
    pub iterations: usize,
    /// `‖F‖∞` at the accepted point.
    pub residual: f64,
    /// `t·(x − x*) − Δs` at the accepted point.
    pub constraint_residual: f64,
    /// Relative deviation of the secant length from the previous step.
    pub secant_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    /// Unstable if any eigenvalue has `Re > margin`; otherwise marginal if
    /// any has `|Re| ≤ margin`; otherwise stable.
    pub fn classify(eigs: &EigenSet) -> Self {
        if eigs.values.iter().any(|z| z.re > STABILITY_MARGIN) {
            Stability::Unstable
        } else if eigs.values.iter().any(|z| z.re.abs() <= STABILITY_MARGIN) {
            Stability::Marginal
        } else {
            Stability::Stable
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

/// One accepted point of the equilibrium curve with its spectral data.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    /// Cumulated arclength.
    pub s: f64,
    pub lambda: f64,
    pub u: Vec<f64>,
    pub eigenvalues: EigenSet,
    /// `det D_uF`.
    pub psi_lp: f64,
    /// `det(2 D_uF ⊙ I)`.
    pub psi_h: f64,
    pub stability: Stability,
}

impl CurvePoint {
    pub fn evaluate<S: System + ?Sized>(sys: &S, s: f64, lambda: f64, u: &[f64]) -> Result<Self, Error> {
        let jac = sys.jac_u(lambda, u)?;
        let eigs = eigenvalues(&jac)?;
        Ok(Self {
            s,
            lambda,
            u: u.to_vec(),
            stability: Stability::classify(&eigs),
            eigenvalues: eigs,
            psi_lp: psi_lp_of(&jac),
            psi_h: psi_h_of(&jac),
        })
    }
}

/// Tracing stopped early; `partial` holds every point accepted before the
/// failure.
#[derive(Debug, Clone, Error)]
#[error("continuation aborted after {} points: {source}", partial.len())]
pub struct TraceAborted {
    pub partial: Vec<CurvePoint>,
    #[source]
    pub source: Error,
}

fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Damped Gauss-Newton on `½‖F(λ*, u)‖²` at fixed `λ*`.
///
/// Each iteration takes the Newton direction (or a Levenberg-Marquardt
/// direction when `D_uF` is singular) and halves it up to 30 times until
/// the residual norm decreases.
pub fn seed_equilibrium<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    guess: &[f64],
    settings: &ContinuationSettings,
) -> Result<Vec<f64>, Error> {
    check_dim(sys, guess)?;
    let n = sys.dim();
    let mut u = guess.to_vec();
    let mut f = sys.eval(lambda, &u)?;
    for iteration in 0..settings.newton_max_iter {
        if norm_inf(&f) <= settings.newton_tol {
            return Ok(u);
        }
        let jac = sys.jac_u(lambda, &u)?;
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let delta = match lu_factor(&jac) {
            Ok(lu) => lu.solve(&rhs)?,
            Err(LinalgError::SingularMatrix { .. }) => {
                // (JᵀJ + μI) δ = −Jᵀ F
                let jt = jac.transpose();
                let mut normal = jt.matmul(&jac);
                let mu = 1e-10 * normal.trace().max(f64::MIN_POSITIVE) / n as f64;
                for i in 0..n {
                    normal[(i, i)] += mu;
                }
                lu_factor(&normal)?.solve(&jt.mul_vec(&rhs))?
            }
            Err(e) => return Err(e.into()),
        };
        let current = norm2(&f);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            if let Ok(ft) = sys.eval(lambda, &trial) {
                if norm2(&ft) < current {
                    u = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations: iteration + 1,
                residual: norm_inf(&f),
            });
        }
    }
    if norm_inf(&f) <= settings.newton_tol {
        Ok(u)
    } else {
        Err(Error::NoConvergence {
            iterations: settings.newton_max_iter,
            residual: norm_inf(&f),
        })
    }
}

/// Unit tangent at a regular point: solve `D_uF·û = −∂F/∂λ`, then
/// `dλ/ds = ±1/√(‖û‖² + 1)` and `du/ds = û·dλ/ds`.
pub fn initial_tangent<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u: &[f64],
    direction: Direction,
) -> Result<Tangent, Error> {
    check_dim(sys, u)?;
    let jac = sys.jac_u(lambda, u)?;
    let fl = sys.jac_lambda(lambda, u)?;
    let lu = lu_factor(&jac).map_err(|e| match e {
        LinalgError::SingularMatrix { .. } => Error::SingularJacobian,
        e => e.into(),
    })?;
    let rhs: Vec<f64> = fl.iter().map(|x| -x).collect();
    let uhat = lu.solve(&rhs)?;
    let dlambda = direction.sign() / libm::sqrt(uhat.iter().map(|x| x * x).sum::<f64>() + 1.0);
    Ok(Tangent {
        dlambda,
        du: uhat.iter().map(|x| x * dlambda).collect(),
    })
}

/// One corrector solve of length `state.ds` from `state.current`.
///
/// Does not modify `state`; see [`advance`] for the step-size control.
pub fn continuation_step<S: System + ?Sized>(
    sys: &S,
    state: &ContinuationState,
    settings: &ContinuationSettings,
) -> Result<StepOutcome, Error> {
    let n = sys.dim();
    let ds = state.ds;
    let (t_u, t_l, secant_deviation) = state.direction();
    let base = &state.current;

    let mut u = base.u.clone();
    let mut lambda = base.lambda;
    let mut residual = f64::INFINITY;
    for iteration in 0..=settings.newton_max_iter {
        let f = match sys.eval(lambda, &u) {
            Ok(f) => f,
            Err(Error::DomainViolation { .. }) => {
                return Err(Error::NewtonDiverged {
                    iterations: iteration,
                    residual,
                })
            }
            Err(e) => return Err(e),
        };
        residual = norm_inf(&f);
        let constraint = t_l * (lambda - base.lambda)
            + t_u.iter().zip(u.iter().zip(&base.u)).map(|(t, (a, b))| t * (a - b)).sum::<f64>()
            - ds;
        if residual <= settings.newton_tol && constraint.abs() <= CONSTRAINT_TOL {
            let du: Vec<f64> = u.iter().zip(&base.u).map(|(a, b)| a - b).collect();
            let dl = lambda - base.lambda;
            let dist = libm::sqrt(dl * dl + du.iter().map(|x| x * x).sum::<f64>());
            if !(dist >= 0.5 * ds && dist <= 1.5 * ds) {
                return Err(Error::NewtonDiverged {
                    iterations: iteration,
                    residual,
                });
            }
            return Ok(StepOutcome {
                point: Point { lambda, u },
                ds,
                iterations: iteration,
                residual,
                constraint_residual: constraint,
                secant_deviation,
            });
        }
        if iteration == settings.newton_max_iter || !residual.is_finite() {
            break;
        }

        let jac = sys.jac_u(lambda, &u)?;
        let fl = sys.jac_lambda(lambda, &u)?;
        let mut bordered = DenseMatrix::zeros(n + 1, n + 1);
        bordered.set_block(0, 0, &jac);
        for i in 0..n {
            bordered[(i, n)] = fl[i];
            bordered[(n, i)] = t_u[i];
        }
        bordered[(n, n)] = t_l;
        let mut rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        rhs.push(-constraint);
        let delta = match lu_factor(&bordered) {
            Ok(lu) => lu.solve(&rhs)?,
            Err(LinalgError::SingularMatrix { .. }) => return Err(Error::SingularBorderedSystem),
            Err(e) => return Err(e.into()),
        };
        for i in 0..n {
            u[i] += delta[i];
        }
        lambda += delta[n];
        if !lambda.is_finite() || u.iter().any(|x| !x.is_finite()) {
            break;
        }
    }
    Err(Error::NewtonDiverged {
        iterations: settings.newton_max_iter,
        residual,
    })
}

/// Takes one accepted step, halving `Δs` on corrector failure (up to
/// `max_halvings` times) and doubling it back toward the nominal value
/// after `restore_after` consecutive successes.
pub fn advance<S: System + ?Sized>(
    sys: &S,
    state: &mut ContinuationState,
    settings: &ContinuationSettings,
) -> Result<StepOutcome, Error> {
    let mut halvings = 0;
    loop {
        match continuation_step(sys, state, settings) {
            Ok(out) => {
                let next = out.point.clone();
                state.previous = Some(core::mem::replace(&mut state.current, next));
                state.step += 1;
                state.last_ds = out.ds;
                if state.ds < settings.ds {
                    state.successes_at_reduced += 1;
                    if state.successes_at_reduced >= settings.restore_after {
                        state.ds = (2.0 * state.ds).min(settings.ds);
                        state.successes_at_reduced = 0;
                    }
                }
                return Ok(out);
            }
            Err(
                e @ (Error::NewtonDiverged { .. }
                | Error::SingularBorderedSystem
                | Error::DomainViolation { .. }),
            ) => {
                if halvings >= settings.max_halvings {
                    return Err(e);
                }
                halvings += 1;
                state.ds *= 0.5;
                state.successes_at_reduced = 0;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Traces the equilibrium curve from a seed equilibrium.
///
/// Emits the seed (at `s = 0`) followed by one [`CurvePoint`] per accepted
/// step. Stops after `max_steps` steps or at the first accepted point whose
/// `λ` leaves the window (that point is included).
pub fn trace_curve<S: System + ?Sized>(
    sys: &S,
    seed_lambda: f64,
    seed_u: &[f64],
    settings: &ContinuationSettings,
) -> Result<Vec<CurvePoint>, TraceAborted> {
    let abort = |partial: Vec<CurvePoint>, source: Error| TraceAborted { partial, source };
    let setup = || -> Result<(CurvePoint, Tangent), Error> {
        settings.validate()?;
        check_dim(sys, seed_u)?;
        if !settings.in_window(seed_lambda) {
            return Err(Error::InvalidSettings("seed parameter lies outside the lambda window"));
        }
        let residual = norm_inf(&sys.eval(seed_lambda, seed_u)?);
        if !(residual <= settings.newton_tol) {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual,
            });
        }
        let tangent = initial_tangent(sys, seed_lambda, seed_u, settings.direction)?;
        Ok((CurvePoint::evaluate(sys, 0.0, seed_lambda, seed_u)?, tangent))
    };
    let (first, tangent) = setup().map_err(|e| abort(Vec::new(), e))?;

    let mut points = vec![first];
    let mut state = ContinuationState::new(
        Point {
            lambda: seed_lambda,
            u: seed_u.to_vec(),
        },
        tangent,
        settings.ds,
    );
    let mut s = 0.0;
    while state.step < settings.max_steps {
        let out = match advance(sys, &mut state, settings) {
            Ok(out) => out,
            Err(e) => return Err(abort(points, e)),
        };
        s += out.ds;
        match CurvePoint::evaluate(sys, s, out.point.lambda, &out.point.u) {
            Ok(p) => points.push(p),
            Err(e) => return Err(abort(points, e)),
        }
        if !settings.in_window(out.point.lambda) {
            break;
        }
    }
    Ok(points)
}
