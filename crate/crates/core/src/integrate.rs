//! Fixed-step classical Runge-Kutta integration of `du/dt = F(λ, u)`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::system::{check_dim, System};

/// Components larger than this in magnitude count as a blow-up.
pub const BLOW_UP_LIMIT: f64 = 1e6;

/// Sampled trajectory: `(t, u(t))` pairs in time order, starting at `t = 0`.
pub type Trajectory = Vec<(f64, Vec<f64>)>;

/// RK4 with step `dt` up to `t_end`, recording every step.
///
/// Explicit stepping: for the Luo-Rudy I model keep `dt ≤ 0.01` ms.
pub fn integrate<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u0: &[f64],
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, Error> {
    integrate_sampled(sys, lambda, u0, dt, t_end, 1)
}

/// Like [`integrate`] but records only every `every`-th step (plus the
/// initial state and the final state).
pub fn integrate_sampled<S: System + ?Sized>(
    sys: &S,
    lambda: f64,
    u0: &[f64],
    dt: f64,
    t_end: f64,
    every: usize,
) -> Result<Trajectory, Error> {
    check_dim(sys, u0)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidSettings("dt must be positive"));
    }
    if !(t_end >= 0.0) {
        return Err(Error::InvalidSettings("t_end must be non-negative"));
    }
    let every = every.max(1);
    let steps = libm::round(t_end / dt) as usize;
    let n = u0.len();
    let mut u = u0.to_vec();
    let mut out = Vec::with_capacity(steps / every + 2);
    out.push((0.0, u.clone()));

    let mut tmp = alloc::vec![0.0; n];
    for step in 1..=steps {
        let k1 = sys.eval(lambda, &u)?;
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        let k2 = sys.eval(lambda, &tmp)?;
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        let k3 = sys.eval(lambda, &tmp)?;
        for i in 0..n {
            tmp[i] = u[i] + dt * k3[i];
        }
        let k4 = sys.eval(lambda, &tmp)?;
        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * dt;
        if u.iter().any(|x| !x.is_finite() || x.abs() > BLOW_UP_LIMIT) {
            return Err(Error::BlowUp { t });
        }
        if step % every == 0 || step == steps {
            out.push((t, u.clone()));
        }
    }
    Ok(out)
}
