//! Dense λ-sweep oracle for the LR1 equilibrium curve.
//!
//! Independent of the continuation code: at each of `samples` equally
//! spaced λ values every equilibrium is found by a V-reduction (gates at
//! their steady state, `[Ca]_i` from its own balance equation, λ then
//! explicit in V), refined by Newton on the full 8-dimensional system with
//! a finite-difference Jacobian and nalgebra LU, and classified by nalgebra
//! eigenvalues. Only the model right-hand side is shared with the library.

use bifurcate::core::models::lr1::{Lr1, DIM};
use bifurcate::core::System;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Left grid index; the cell is `[λ_j, λ_{j+1}]`.
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
    /// Membrane potential of the equilibrium involved, at `λ_j`.
    pub v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGolden {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub samples: usize,
    pub cell_width: f64,
    pub limit_points: Vec<Cell>,
    pub hopf: Vec<Cell>,
    /// Number of equilibria at each sample.
    pub root_counts: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Equilibrium {
    u: Vec<f64>,
    eigs: Vec<(f64, f64)>,
}

/// `[Ca]_i` balancing uptake and the slow inward current at voltage `v`.
/// The Ca equation is decreasing in `[Ca]_i`, so bisection on `ln [Ca]_i`
/// finds the unique root.
fn calcium(m: &Lr1, v: f64) -> f64 {
    let f = |ln_ca: f64| m.eval(0.0, &m.gated_state(v, ln_ca.exp())).unwrap()[1];
    let (mut lo, mut hi) = (1e-9f64.ln(), 1.0f64.ln());
    assert!(f(lo) > 0.0 && f(hi) < 0.0, "calcium root not bracketed at V={v}");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn reduced_state(m: &Lr1, v: f64) -> Vec<f64> {
    m.gated_state(v, calcium(m, v))
}

/// λ at which the reduced state for `v` is an equilibrium.
fn lambda_of_v(m: &Lr1, v: f64) -> f64 {
    m.params().c_m * m.eval(0.0, &reduced_state(m, v)).unwrap()[0]
}

fn fd_jacobian(m: &Lr1, lambda: f64, u: &[f64]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(DIM, DIM);
    let mut x = u.to_vec();
    for c in 0..DIM {
        let scale = if c == 1 { 1e-6 } else { 1.0 };
        let h = 1e-6 * u[c].abs().max(scale);
        x[c] = u[c] + h;
        let fp = m.eval(lambda, &x).unwrap();
        x[c] = u[c] - h;
        let fm = m.eval(lambda, &x).unwrap();
        x[c] = u[c];
        for r in 0..DIM {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

fn newton(m: &Lr1, lambda: f64, u0: &[f64]) -> Option<Vec<f64>> {
    let mut u = DVector::from_column_slice(u0);
    for _ in 0..30 {
        let f = DVector::from_vec(m.eval(lambda, u.as_slice()).ok()?);
        if f.amax() <= 1e-10 {
            return Some(u.as_slice().to_vec());
        }
        let du = fd_jacobian(m, lambda, u.as_slice()).lu().solve(&(-f))?;
        u += du;
    }
    None
}

fn equilibrium(m: &Lr1, lambda: f64, u: Vec<f64>) -> Equilibrium {
    let eigs = fd_jacobian(m, lambda, &u)
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    Equilibrium { u, eigs }
}

/// Counts of eigenvalues with positive real part: (real, complex).
fn unstable_counts(e: &Equilibrium) -> (usize, usize) {
    let real = e.eigs.iter().filter(|z| z.0 > 0.0 && z.1.abs() <= 1e-8).count();
    let complex = e.eigs.iter().filter(|z| z.0 > 0.0 && z.1.abs() > 1e-8).count();
    (real, complex)
}

pub fn compute(m: &Lr1, lambda_min: f64, lambda_max: f64, samples: usize) -> SweepGolden {
    // λ(V) on a fine voltage grid
    let (v_lo, v_hi, dv) = (-95.0, 60.0, 0.01);
    let nv = ((v_hi - v_lo) / dv) as usize + 1;
    let vs: Vec<f64> = (0..nv).map(|k| v_lo + k as f64 * dv).collect();
    let ls: Vec<f64> = vs.iter().map(|&v| lambda_of_v(m, v)).collect();

    let cell_width = (lambda_max - lambda_min) / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples).map(|j| lambda_min + j as f64 * cell_width).collect();
    let mut roots: Vec<Vec<Equilibrium>> = Vec::with_capacity(samples);
    for &lambda in &grid {
        let mut found: Vec<Equilibrium> = Vec::new();
        for k in 0..nv - 1 {
            let (a, b) = (ls[k] - lambda, ls[k + 1] - lambda);
            if a * b > 0.0 || (b == 0.0 && a != 0.0) {
                continue;
            }
            let v = vs[k] + dv * a / (a - b);
            // a jump at a piecewise seam can fake a sign change; Newton decides
            let Some(u) = newton(m, lambda, &reduced_state(m, v)) else {
                continue;
            };
            if (u[0] - v).abs() > 0.1 || found.iter().any(|e| (e.u[0] - u[0]).abs() < 1e-6) {
                continue;
            }
            found.push(equilibrium(m, lambda, u));
        }
        found.sort_by(|x, y| x.u[0].total_cmp(&y.u[0]));
        roots.push(found);
    }

    let mut limit_points = Vec::new();
    let mut hopf = Vec::new();
    for j in 0..samples - 1 {
        let (a, b) = (&roots[j], &roots[j + 1]);
        if a.len() != b.len() {
            // the equilibrium closest to where the pair appears or vanishes
            let v = if a.len() > b.len() { fold_voltage(a) } else { fold_voltage(b) };
            limit_points.push(Cell {
                j,
                lo: grid[j],
                hi: grid[j + 1],
                v,
                beta: None,
            });
            continue;
        }
        for (x, y) in a.iter().zip(b) {
            let (rx, cx) = unstable_counts(x);
            let (ry, cy) = unstable_counts(y);
            if rx == ry && cx.abs_diff(cy) == 2 {
                let beta = x
                    .eigs
                    .iter()
                    .filter(|z| z.1 > 1e-8)
                    .min_by(|p, q| p.0.abs().total_cmp(&q.0.abs()))
                    .map(|z| z.1);
                hopf.push(Cell {
                    j,
                    lo: grid[j],
                    hi: grid[j + 1],
                    v: x.u[0],
                    beta,
                });
            }
        }
    }
    SweepGolden {
        lambda_min,
        lambda_max,
        samples,
        cell_width,
        limit_points,
        hopf,
        root_counts: roots.iter().map(|r| r.len()).collect(),
    }
}

/// Midpoint of the two adjacent roots closest to each other: the pair that
/// merges at the fold.
fn fold_voltage(more: &[Equilibrium]) -> f64 {
    let mut best = (f64::INFINITY, more[0].u[0]);
    for w in more.windows(2) {
        let gap = w[1].u[0] - w[0].u[0];
        if gap < best.0 {
            best = (gap, 0.5 * (w[0].u[0] + w[1].u[0]));
        }
    }
    best.1
}

pub const GOLDEN_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/lr1_sweep_golden.json");

pub fn load_golden() -> SweepGolden {
    let text = std::fs::read_to_string(GOLDEN_PATH).expect("golden file present");
    serde_json::from_str(&text).expect("golden file parses")
}
