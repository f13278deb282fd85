//! Test functions and sign-change detection along a traced curve.
//!
//! `ψ_LP = det D_uF` vanishes at limit points. `ψ_H = det(2 D_uF ⊙ I)`
//! vanishes whenever two eigenvalues sum to zero: at Hopf points
//! (`±iβ`) and at neutral saddles (`±μ`, real). A sign change of `ψ_H`
//! is therefore classified by looking at how the complex eigenvalues move
//! across the bracketing step.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::continuation::CurvePoint;
use crate::error::Error;
use crate::linalg::{bialternate, determinant, DenseMatrix};
use crate::system::System;

/// Eigenvalues with `|Im|` at or below this count as real.
pub const COMPLEX_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EventKind {
    LimitPoint,
    HopfCandidate,
    NeutralSaddle,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::LimitPoint => "limit_point",
            EventKind::HopfCandidate => "hopf_candidate",
            EventKind::NeutralSaddle => "neutral_saddle",
        }
    }
}

/// Which end of the bracketing step has the smaller `|ψ|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Endpoint {
    Left,
    Right,
}

/// The upper-half-plane eigenvalue whose real part changes sign, at the left
/// and right end of the step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingPair {
    pub left: Complex64,
    pub right: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfClassification {
    pub kind: EventKind,
    pub crossing: Option<CrossingPair>,
    /// More than one complex pair crossed in the same step.
    pub ambiguous: bool,
}

/// A sign change of `ψ_LP` or `ψ_H` between consecutive curve points.
#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationEvent {
    pub kind: EventKind,
    /// Index of the left point in the curve.
    pub index: usize,
    pub left: CurvePoint,
    pub right: CurvePoint,
    pub best: Endpoint,
    /// The relevant test function at the left and right point.
    pub test_values: (f64, f64),
    pub crossing: Option<CrossingPair>,
    pub ambiguous: bool,
}

impl BifurcationEvent {
    pub fn best_point(&self) -> &CurvePoint {
        match self.best {
            Endpoint::Left => &self.left,
            Endpoint::Right => &self.right,
        }
    }

    /// `(min, max)` of `λ` over the bracketing step.
    pub fn lambda_bracket(&self) -> (f64, f64) {
        let (a, b) = (self.left.lambda, self.right.lambda);
        (a.min(b), a.max(b))
    }

    /// Imaginary part of the crossing eigenvalue at the best endpoint.
    pub fn crossing_frequency(&self) -> Option<f64> {
        self.crossing.map(|c| match self.best {
            Endpoint::Left => c.left.im,
            Endpoint::Right => c.right.im,
        })
    }
}

/// `det D_uF(λ, u)`.
pub fn psi_lp<S: System + ?Sized>(sys: &S, lambda: f64, u: &[f64]) -> Result<f64, Error> {
    Ok(psi_lp_of(&sys.jac_u(lambda, u)?))
}

/// `det(2 D_uF(λ, u) ⊙ I)`.
pub fn psi_h<S: System + ?Sized>(sys: &S, lambda: f64, u: &[f64]) -> Result<f64, Error> {
    Ok(psi_h_of(&sys.jac_u(lambda, u)?))
}

pub fn psi_lp_of(jac: &DenseMatrix) -> f64 {
    determinant(jac)
}

/// For `n < 2` the bialternate product is empty and its determinant is 1.
pub fn psi_h_of(jac: &DenseMatrix) -> f64 {
    if jac.nrows() < 2 {
        return 1.0;
    }
    match bialternate(jac) {
        Ok(b) => determinant(&b),
        Err(_) => f64::NAN,
    }
}

/// A change counts when the product is negative, or when the right value is
/// exactly zero and the left is not (so an exact zero is counted once).
fn sign_change(a: f64, b: f64) -> bool {
    a * b < 0.0 || (b == 0.0 && a != 0.0)
}

fn crosses_axis(a: f64, b: f64) -> bool {
    (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)
}

/// Pairs eigenvalues of two neighbouring spectra by repeatedly taking the
/// closest unmatched pair. Returns `m[i] = j` for `left[i] ↔ right[j]`.
fn match_spectra(left: &[Complex64], right: &[Complex64]) -> Vec<usize> {
    let n = left.len().min(right.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(left.len() * right.len());
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            pairs.push((libm::hypot(a.re - b.re, a.im - b.im), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut m = alloc::vec![usize::MAX; left.len()];
    let mut taken = alloc::vec![false; right.len()];
    let mut count = 0;
    for (_, i, j) in pairs {
        if count == n {
            break;
        }
        if m[i] == usize::MAX && !taken[j] {
            m[i] = j;
            taken[j] = true;
            count += 1;
        }
    }
    m
}

/// Decides whether a `ψ_H` sign change between `left` and `right` is a Hopf
/// candidate: some complex eigenvalue (`|Im| > 1e-8` at both ends) must
/// have a real part that changes sign. Otherwise it is a neutral saddle.
pub fn classify_hopf(left: &CurvePoint, right: &CurvePoint) -> HopfClassification {
    let l = &left.eigenvalues.values;
    let r = &right.eigenvalues.values;
    let m = match_spectra(l, r);
    let mut crossings: Vec<CrossingPair> = Vec::new();
    for (i, a) in l.iter().enumerate() {
        if a.im <= COMPLEX_THRESHOLD || m[i] == usize::MAX {
            continue;
        }
        let mut b = r[m[i]];
        if b.im.abs() <= COMPLEX_THRESHOLD {
            continue;
        }
        if b.im < 0.0 {
            b = b.conj();
        }
        if crosses_axis(a.re, b.re) {
            crossings.push(CrossingPair { left: *a, right: b });
        }
    }
    // the pair closest to the imaginary axis
    crossings.sort_by(|x, y| {
        (x.left.re.abs() + x.right.re.abs()).total_cmp(&(y.left.re.abs() + y.right.re.abs()))
    });
    match crossings.first() {
        None => HopfClassification {
            kind: EventKind::NeutralSaddle,
            crossing: None,
            ambiguous: false,
        },
        Some(c) => HopfClassification {
            kind: EventKind::HopfCandidate,
            crossing: Some(*c),
            ambiguous: crossings.len() > 1,
        },
    }
}

/// Scans consecutive curve points for sign changes of `ψ_LP` and `ψ_H`.
///
/// Events come in curve order; within one step a limit point precedes a
/// `ψ_H` event.
pub fn scan_events(curve: &[CurvePoint]) -> Vec<BifurcationEvent> {
    let mut events = Vec::new();
    for (index, w) in curve.windows(2).enumerate() {
        let (left, right) = (&w[0], &w[1]);
        let best_of = |a: f64, b: f64| {
            if b.abs() <= a.abs() {
                Endpoint::Right
            } else {
                Endpoint::Left
            }
        };
        if sign_change(left.psi_lp, right.psi_lp) {
            events.push(BifurcationEvent {
                kind: EventKind::LimitPoint,
                index,
                left: left.clone(),
                right: right.clone(),
                best: best_of(left.psi_lp, right.psi_lp),
                test_values: (left.psi_lp, right.psi_lp),
                crossing: None,
                ambiguous: false,
            });
        }
        if sign_change(left.psi_h, right.psi_h) {
            let class = classify_hopf(left, right);
            events.push(BifurcationEvent {
                kind: class.kind,
                index,
                left: left.clone(),
                right: right.clone(),
                best: best_of(left.psi_h, right.psi_h),
                test_values: (left.psi_h, right.psi_h),
                crossing: class.crossing,
                ambiguous: class.ambiguous,
            });
        }
    }
    events
}
