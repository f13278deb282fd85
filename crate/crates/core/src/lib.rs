//! Numerical continuation and bifurcation analysis for parameterized
//! vector fields `F(λ, u)`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! kernels:
//!
//! * [`linalg`]: dense LU, determinant, Hessenberg/QR eigenvalues and the
//!   bialternate product `2A ⊙ I`.
//! * [`system`] and [`models`]: the [`System`] abstraction, the Luo-Rudy I
//!   ventricular myocyte model and small normal-form test problems.
//! * [`continuation`]: seed solve, initial tangent and pseudo-arclength
//!   predictor-corrector tracing of the equilibrium curve.
//! * [`detect`]: the determinant and bialternate test functions and the
//!   sign-change scan over a traced curve.
//! * [`locate`]: Newton's method on the bordered fold and Hopf systems.
//! * [`integrate`]: fixed-step RK4, used to check stability classes by
//!   simulation.
//!
//! File formats and the command-line driver live in the `bifurcate` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod continuation;
pub mod detect;
pub mod dual;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod locate;
pub mod models;
pub mod system;

pub use continuation::{
    advance, continuation_step, initial_tangent, seed_equilibrium, trace_curve, ContinuationSettings,
    ContinuationState, CurvePoint, Direction, Point, Stability, StepOutcome, Tangent,
    TraceAborted,
};
pub use detect::{
    classify_hopf, psi_h, psi_lp, scan_events, BifurcationEvent, CrossingPair, Endpoint, EventKind,
};
pub use error::{Error, LinalgError};
pub use integrate::{integrate, integrate_sampled, Trajectory};
pub use linalg::{
    bialternate, determinant, eigenvalues, lu_factor, lu_solve, DenseMatrix, EigenSet,
    LuFactorization,
};
pub use locate::{
    locate_hopf, locate_lp, second_directional_derivative, HopfSolution, LocateSettings,
    LpSolution,
};
pub use models::lr1::{lr1_system, Lr1, ParamSet};
pub use models::normal_forms::{circle_system, fold_normal_form, hopf_normal_form};
pub use num_complex::Complex64;
pub use system::{FiniteDifferences, System};
