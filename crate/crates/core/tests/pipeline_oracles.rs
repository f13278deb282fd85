use bifurcate_core::continuation::{
    initial_tangent, seed_equilibrium, trace_curve, ContinuationSettings, CurvePoint, Direction, Stability,
};
use bifurcate_core::detect::{classify_hopf, psi_h, psi_lp, scan_events, EventKind};
use bifurcate_core::linalg::{eigenvalues, EigenSet};
use bifurcate_core::locate::{
    fold_residual, hopf_residual, locate_hopf, locate_lp, locate_lp_from, second_directional_derivative,
    LocateSettings,
};
use bifurcate_core::models::lr1::{lr1_system, Lr1, ParamSet};
use bifurcate_core::system::{fd_jac_u, fd_second_directional};
use bifurcate_core::{circle_system, fold_normal_form, hopf_normal_form, Complex64, Error, System};
use proptest::prelude::*;

fn lr1() -> Lr1 {
    lr1_system(ParamSet::default()).unwrap()
}

fn lr1_settings() -> ContinuationSettings {
    ContinuationSettings {
        ds: 0.1,
        max_steps: 4000,
        direction: Direction::Backward,
        lambda_min: -3.0,
        lambda_max: 0.5,
        ..Default::default()
    }
}

fn lr1_curve() -> (Lr1, Vec<CurvePoint>) {
    let m = lr1();
    let s = lr1_settings();
    let seed = seed_equilibrium(&m, 0.0, &m.gated_state(-84.0, 2e-4), &s).unwrap();
    let curve = trace_curve(&m, 0.0, &seed, &s).unwrap();
    (m, curve)
}

fn inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn circle_full_revolution() {
    let s = ContinuationSettings {
        ds: 0.02,
        max_steps: 500,
        lambda_min: -2.0,
        lambda_max: 2.0,
        newton_tol: 1e-12,
        ..Default::default()
    };
    let curve = trace_curve(&circle_system(), 0.0, &[1.0], &s).unwrap();
    assert_eq!(curve.len(), 501);
    let mut turned = 0.0;
    for w in curve.windows(2) {
        let a0 = w[0].u[0].atan2(w[0].lambda);
        let a1 = w[1].u[0].atan2(w[1].lambda);
        let mut d = a1 - a0;
        if d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        } else if d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        turned += d;
    }
    for p in &curve {
        assert!((p.u[0] * p.u[0] + p.lambda * p.lambda - 1.0).abs() < 1e-10);
    }
    // arc length 500·0.02 = 10 > 2π
    assert!(turned.abs() > 2.0 * std::f64::consts::PI);
    assert!((turned.abs() - 10.0).abs() < 1e-2, "{turned}");
    // folds at quarter, three-quarter and five-quarter turns
    let folds = scan_events(&curve).iter().filter(|e| e.kind == EventKind::LimitPoint).count();
    assert_eq!(folds, 3);
}

#[test]
fn tangent_directions() {
    let t = initial_tangent(&fold_normal_form(), 1.0, &[1.0], Direction::Forward).unwrap();
    assert!((t.dlambda / t.du[0] - 2.0).abs() < 1e-14);
}

#[test]
fn second_directional_examples() {
    struct Linear;
    impl System for Linear {
        fn dim(&self) -> usize {
            3
        }
        fn name(&self) -> &str {
            "linear"
        }
        fn eval(&self, l: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
            Ok(vec![u[0] - 2.0 * u[1], l * u[2] + u[0], 3.0 * u[1]])
        }
    }
    let s = second_directional_derivative(&Linear, 0.7, &[1.0, -2.0, 0.5], &[0.3, 0.1, -1.0]).unwrap();
    assert!(s.max_abs() < 1e-8, "{s:?}");
    let s = second_directional_derivative(&fold_normal_form(), 0.3, &[0.5], &[1.0]).unwrap();
    assert!((s[(0, 0)] + 2.0).abs() < 1e-8);
}

#[test]
fn lr1_second_derivative_is_symmetric() {
    let m = lr1();
    let s = lr1_settings();
    let u = seed_equilibrium(&m, 0.0, &m.gated_state(-84.0, 2e-4), &s).unwrap();
    let points = [u.clone(), m.gated_state(-20.0, 5e-4), m.gated_state(10.0, 1e-3)];
    let dirs = [
        [1.0, 1e-6, 0.1, -0.2, 0.05, 0.3, -0.1, 0.2],
        [-0.5, 2e-6, 0.3, 0.1, -0.2, 0.05, 0.2, -0.3],
    ];
    for p in &points {
        let (e, h) = (&dirs[0], &dirs[1]);
        // D_u(D_uF·h)·e = D_u(D_uF·e)·h, both by finite differences
        let a = fd_second_directional(&m, -0.5, p, h).unwrap().mul_vec(e);
        let b = fd_second_directional(&m, -0.5, p, e).unwrap().mul_vec(h);
        let scale = inf(&a).max(inf(&b)).max(1e-12);
        for i in 0..8 {
            assert!((a[i] - b[i]).abs() <= 1e-4 * scale, "V={} row {i}: {} vs {}", p[0], a[i], b[i]);
        }
    }
}

#[test]
fn lr1_jacobian_matches_differences_at_rest() {
    let m = lr1();
    let u = seed_equilibrium(&m, 0.0, &m.gated_state(-84.0, 2e-4), &lr1_settings()).unwrap();
    let a = m.jac_u(0.0, &u).unwrap();
    let f = fd_jac_u(&m, 0.0, &u).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert!((a[(i, j)] - f[(i, j)]).abs() <= 1e-4 * a[(i, j)].abs().max(1e-6), "({i},{j})");
        }
    }
    let t = initial_tangent(&m, 0.0, &u, Direction::Backward).unwrap();
    assert!((t.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn lr1_seed_is_the_ode_steady_state() {
    let m = lr1();
    let u = seed_equilibrium(&m, 0.0, &m.gated_state(-84.0, 2e-4), &lr1_settings()).unwrap();
    assert!(inf(&m.eval(0.0, &u).unwrap()) < 1e-9);
    // from a nearby state the flow returns to the seed
    let mut start = u.clone();
    start[0] += 0.5;
    let traj = bifurcate_core::integrate_sampled(&m, 0.0, &start, 0.01, 3000.0, 1000).unwrap();
    let end = &traj.last().unwrap().1;
    assert!((end[0] - u[0]).abs() < 1e-3, "{} vs {}", end[0], u[0]);
}

#[test]
fn lr1_diagram_structure() {
    let (m, curve) = lr1_curve();
    let events = scan_events(&curve);
    let lps: Vec<_> = events.iter().filter(|e| e.kind == EventKind::LimitPoint).collect();
    let hopfs: Vec<_> = events.iter().filter(|e| e.kind == EventKind::HopfCandidate).collect();
    assert_eq!(lps.len(), 2);
    assert_eq!(hopfs.len(), 1);
    assert!(!hopfs[0].ambiguous);

    for w in events.windows(2) {
        assert!(w[0].index <= w[1].index);
    }
    for e in &events {
        assert_eq!(curve[e.index], e.left);
        assert_eq!(curve[e.index + 1], e.right);
    }

    let set = LocateSettings::default();
    let ds = lr1_settings().ds;
    for e in &lps {
        let sol = locate_lp(&m, e, &set).unwrap();
        let g = fold_residual(&m, sol.lambda, &sol.u, &sol.h, sol.k).unwrap();
        assert!(inf(&g) <= 1e-9);
        assert_eq!(sol.h[sol.k], 1.0);
        let (lo, hi) = e.lambda_bracket();
        assert!(sol.lambda >= lo - ds && sol.lambda <= hi + ds);
        // ψ_LP vanishes relative to the product of the row sup norms
        let j = m.jac_u(sol.lambda, &sol.u).unwrap();
        let scale: f64 = (0..8).map(|i| j.row(i).iter().fold(0.0f64, |a, x| a.max(x.abs()))).product();
        assert!(psi_lp(&m, sol.lambda, &sol.u).unwrap().abs() < 1e-6 * scale);
    }
    let sol = locate_hopf(&m, hopfs[0], &set).unwrap();
    let r = hopf_residual(&m, sol.lambda, sol.beta, &sol.u, &sol.h, &sol.g, sol.k).unwrap();
    assert!(inf(&r) <= 1e-9);
    assert!(sol.beta > 0.0);
    assert_eq!((sol.h[sol.k], sol.g[sol.k]), (1.0, 0.0));
    let (lo, hi) = hopfs[0].lambda_bracket();
    assert!(sol.lambda >= lo - ds && sol.lambda <= hi + ds);

    let j = m.jac_u(sol.lambda, &sol.u).unwrap();
    let e = eigenvalues(&j).unwrap();
    let near_axis: Vec<_> = e.values.iter().filter(|z| z.re.abs() < 1e-7).collect();
    assert_eq!(near_axis.len(), 2, "{:?}", e.values);
    for z in near_axis {
        assert!((z.im.abs() - sol.beta).abs() < 1e-7);
    }
    // (h + ig) is an eigenvector for +iβ
    let jh = j.mul_vec(&sol.h);
    let jg = j.mul_vec(&sol.g);
    for i in 0..8 {
        let lhs = Complex64::new(jh[i], jg[i]);
        let rhs = Complex64::new(0.0, sol.beta) * Complex64::new(sol.h[i], sol.g[i]);
        assert!((lhs - rhs).re.abs() < 1e-9 && (lhs - rhs).im.abs() < 1e-9);
    }
    // ψ_H vanishes to working precision (scaled by the 28 row sups of 2J⊙I)
    let b = bifurcate_core::bialternate(&j).unwrap();
    let scale: f64 = (0..b.nrows()).map(|i| b.row(i).iter().fold(0.0f64, |a, x| a.max(x.abs()))).product();
    assert!(psi_h(&m, sol.lambda, &sol.u).unwrap().abs() < 1e-6 * scale);
}

#[test]
fn lr1_stability_by_branch() {
    let (m, curve) = lr1_curve();
    let events = scan_events(&curve);
    let lp: Vec<_> = events.iter().filter(|e| e.kind == EventKind::LimitPoint).map(|e| e.index).collect();
    let set = LocateSettings::default();
    let hopf = events.iter().find(|e| e.kind == EventKind::HopfCandidate).unwrap();
    let lh = locate_hopf(&m, hopf, &set).unwrap().lambda;
    for (i, p) in curve.iter().enumerate() {
        let middle = i > lp[0] && i <= lp[1];
        let want = if middle || (i > lp[1] && p.lambda > lh) {
            Stability::Unstable
        } else {
            Stability::Stable
        };
        assert_eq!(p.stability, want, "point {i} at lambda {}", p.lambda);
    }
}

#[test]
fn newton_is_quadratic_on_normal_forms() {
    let sol = locate_lp_from(&fold_normal_form(), 0.04, &[0.2], &[1.0], 0, &LocateSettings {
        tol: 1e-14,
        max_iter: 25,
    })
    .unwrap();
    assert!(sol.iterations <= 10);
    for w in sol.history.windows(2) {
        if w[0] > 1e-7 && w[1] > 0.0 {
            assert!(w[1] / (w[0] * w[0]) < 10.0, "{:?}", sol.history);
        }
    }
    let h = hopf_normal_form();
    let sol = bifurcate_core::locate::locate_hopf_from(
        &h,
        0.1,
        1.1,
        &[0.05, -0.05],
        &[1.0, 0.1],
        &[0.1, -1.0],
        0,
        &LocateSettings { tol: 1e-14, max_iter: 25 },
    )
    .unwrap();
    assert!(sol.lambda.abs() < 1e-12 && (sol.beta - 1.0).abs() < 1e-12);
    for w in sol.history.windows(2) {
        if w[0] > 1e-7 && w[1] > 0.0 {
            assert!(w[1] / (w[0] * w[0]) < 10.0, "{:?}", sol.history);
        }
    }
}

fn synthetic(lambda: f64, eigs: &[(f64, f64)], psi_lp: f64, psi_h: f64) -> CurvePoint {
    CurvePoint {
        s: 0.0,
        lambda,
        u: vec![],
        eigenvalues: EigenSet {
            values: eigs.iter().map(|&(r, i)| Complex64::new(r, i)).collect(),
            converged: true,
        },
        psi_lp,
        psi_h,
        stability: Stability::Stable,
    }
}

#[test]
fn classification_examples() {
    let l = synthetic(0.0, &[(-0.1, 2.0), (-0.1, -2.0), (-3.0, 0.0), (-5.0, 0.0)], 1.0, -1.0);
    let r = synthetic(0.1, &[(0.1, 2.0), (0.1, -2.0), (-3.0, 0.0), (-5.0, 0.0)], 1.0, 1.0);
    assert_eq!(classify_hopf(&l, &r).kind, EventKind::HopfCandidate);
    let l = synthetic(0.0, &[(-2.0, 0.0), (1.9, 0.0), (-3.0, 1.0), (-3.0, -1.0)], 1.0, -1.0);
    let r = synthetic(0.1, &[(-1.9, 0.0), (2.0, 0.0), (-3.0, 1.0), (-3.0, -1.0)], 1.0, 1.0);
    assert_eq!(classify_hopf(&l, &r).kind, EventKind::NeutralSaddle);

    // Hopf normal form brackets at λ = ∓Δs
    let h = hopf_normal_form();
    let at = |l: f64| CurvePoint::evaluate(&h, 0.0, l, &[0.0, 0.0]).unwrap();
    let c = classify_hopf(&at(-0.05), &at(0.05));
    assert_eq!(c.kind, EventKind::HopfCandidate);
}

fn eig_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, prop_oneof![Just(0.0), 0.1f64..3.0]), 1..4).prop_map(|v| {
        let mut out = Vec::new();
        for (re, im) in v {
            out.push((re, im));
            if im != 0.0 {
                out.push((re, -im));
            }
        }
        out
    })
}

proptest! {
    #[test]
    fn classify_is_symmetric_under_swap(a in eig_strategy(), shift in prop::collection::vec(-0.3f64..0.3, 8)) {
        let b: Vec<(f64, f64)> = a.iter().enumerate().map(|(i, &(r, im))| (r + shift[i % 8], im)).collect();
        let l = synthetic(0.0, &a, 1.0, -1.0);
        let r = synthetic(0.1, &b, 1.0, 1.0);
        let fwd = classify_hopf(&l, &r);
        let back = classify_hopf(&r, &l);
        prop_assert_eq!(fwd.kind, back.kind);
        prop_assert_eq!(fwd.ambiguous, back.ambiguous);
        if let (Some(x), Some(y)) = (fwd.crossing, back.crossing) {
            prop_assert_eq!(x.left, y.right);
            prop_assert_eq!(x.right, y.left);
        }
    }

    #[test]
    fn constant_sign_curves_have_no_events(
        vals in prop::collection::vec((1e-6f64..1e3, 1e-6f64..1e3), 2..40),
        sl in prop::bool::ANY,
        sh in prop::bool::ANY,
    ) {
        let (a, b) = (if sl { 1.0 } else { -1.0 }, if sh { 1.0 } else { -1.0 });
        let curve: Vec<_> = vals
            .iter()
            .enumerate()
            .map(|(i, &(p, q))| synthetic(i as f64, &[(-1.0, 0.0)], a * p, b * q))
            .collect();
        prop_assert!(scan_events(&curve).is_empty());
    }

    #[test]
    fn fold_brackets_straddle_the_fold(u0 in 0.3f64..3.0, ds in 0.01f64..0.2) {
        let s = ContinuationSettings {
            ds,
            max_steps: 2000,
            direction: Direction::Backward,
            lambda_max: u0 * u0 + 0.5,
            ..Default::default()
        };
        let curve = trace_curve(&fold_normal_form(), u0 * u0, &[u0], &s).unwrap();
        let ev = scan_events(&curve);
        prop_assert_eq!(ev.len(), 1);
        prop_assert!(ev[0].left.u[0] * ev[0].right.u[0] <= 0.0);
        let sol = locate_lp(&fold_normal_form(), &ev[0], &LocateSettings::default()).unwrap();
        let (lo, hi) = ev[0].lambda_bracket();
        prop_assert!(sol.lambda >= lo - ds && sol.lambda <= hi + ds);
    }
}

#[test]
fn extended_jacobian_matches_differences() {
    // columns of the assembled Jacobian of G against central differences of G
    let m = lr1();
    let u = m.gated_state(-30.0, 4e-4);
    let h: Vec<f64> = (0..8).map(|i| 0.1 * (i as f64 + 1.0).sin()).collect();
    let s = second_directional_derivative(&m, -0.8, &u, &h).unwrap();
    let eps = 1e-6;
    for j in 0..8 {
        let step = eps * u[j].abs().max(if j == 1 { 1e-6 } else { 1.0 });
        let mut up = u.clone();
        up[j] += step;
        let mut dn = u.clone();
        dn[j] -= step;
        let jp = m.jac_u(-0.8, &up).unwrap().mul_vec(&h);
        let jm = m.jac_u(-0.8, &dn).unwrap().mul_vec(&h);
        for i in 0..8 {
            let fd = (jp[i] - jm[i]) / (2.0 * step);
            assert!((s[(i, j)] - fd).abs() <= 1e-5 * s.max_abs(), "({i},{j}) {} vs {fd}", s[(i, j)]);
        }
    }
}
