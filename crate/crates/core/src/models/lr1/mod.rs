//! Luo-Rudy I ventricular myocyte model with the stimulus current `I_st`
//! as the continuation parameter.
//!
//! State `u = (V, [Ca]_i, h, j, m, d, f, X)`. The membrane equation is
//!
//! ```text
//! dV/dt = −(I_st + I_Na + I_si + I_K + I_K1 + I_Kp + I_b) / C_m
//! ```
//!
//! with `I_K = g_K·X·X_i(V)·(V − E_K)`, and each gate obeys
//! `du/dt = α(V) − (α(V) + β(V))·u`.
//!
//! Derivatives are computed by evaluating the same generic field on dual
//! numbers, so `jac_u`, `jac_lambda` and the second directional derivative
//! are exact to rounding.

pub mod constants;

use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use self::constants::*;
use crate::dual::{Dual, Real};
use crate::error::Error;
use crate::linalg::DenseMatrix;
use crate::system::{check_dim, System};

pub const DIM: usize = 8;

/// Index of each state component.
pub mod idx {
    pub const V: usize = 0;
    pub const CA: usize = 1;
    pub const H: usize = 2;
    pub const J: usize = 3;
    pub const M: usize = 4;
    pub const D: usize = 5;
    pub const F: usize = 6;
    pub const X: usize = 7;
}

pub const STATE_NAMES: [&str; DIM] = ["V", "Ca_i", "h", "j", "m", "d", "f", "X"];

/// Model parameters. Keys in configuration files use the conventional
/// symbols (`C_m`, `g_Na`, `K_o`, ...). `g_K` and `g_K1` are the
/// conductances at `K_o = 5.4 mM`; the model rescales them by `√(K_o/5.4)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ParamSet {
    /// Stimulus current. Replaced by `λ` in [`Lr1::eval`].
    #[cfg_attr(feature = "serde", serde(rename = "I_st"))]
    pub i_st: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_m"))]
    pub c_m: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g_Na"))]
    pub g_na: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g_si"))]
    pub g_si: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g_K"))]
    pub g_k: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g_K1"))]
    pub g_k1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g_Kp"))]
    pub g_kp: f64,
    #[cfg_attr(feature = "serde", serde(rename = "g_b", alias = "G_b"))]
    pub g_b: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Na_o"))]
    pub na_o: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Na_i"))]
    pub na_i: f64,
    #[cfg_attr(feature = "serde", serde(rename = "K_o"))]
    pub k_o: f64,
    #[cfg_attr(feature = "serde", serde(rename = "K_i"))]
    pub k_i: f64,
    #[cfg_attr(feature = "serde", serde(rename = "PR_NaK"))]
    pub pr_nak: f64,
    #[cfg_attr(feature = "serde", serde(rename = "E_b"))]
    pub e_b: f64,
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub t: f64,
}

impl Default for ParamSet {
    fn default() -> Self {
        Self {
            i_st: 0.0,
            c_m: DEFAULT_C_M,
            g_na: DEFAULT_G_NA,
            g_si: DEFAULT_G_SI,
            g_k: DEFAULT_G_K,
            g_k1: DEFAULT_G_K1,
            g_kp: DEFAULT_G_KP,
            g_b: DEFAULT_G_B,
            na_o: DEFAULT_NA_O,
            na_i: DEFAULT_NA_I,
            k_o: DEFAULT_K_O,
            k_i: DEFAULT_K_I,
            pr_nak: DEFAULT_PR_NAK,
            e_b: DEFAULT_E_B,
            t: DEFAULT_T,
        }
    }
}

impl ParamSet {
    pub fn validate(&self) -> Result<(), Error> {
        let all = [
            ("I_st", self.i_st),
            ("C_m", self.c_m),
            ("g_Na", self.g_na),
            ("g_si", self.g_si),
            ("g_K", self.g_k),
            ("g_K1", self.g_k1),
            ("g_Kp", self.g_kp),
            ("g_b", self.g_b),
            ("Na_o", self.na_o),
            ("Na_i", self.na_i),
            ("K_o", self.k_o),
            ("K_i", self.k_i),
            ("PR_NaK", self.pr_nak),
            ("E_b", self.e_b),
            ("T", self.t),
        ];
        for (name, value) in all {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        let positive = [
            ("C_m", self.c_m),
            ("Na_o", self.na_o),
            ("Na_i", self.na_i),
            ("K_o", self.k_o),
            ("K_i", self.k_i),
            ("T", self.t),
        ];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if self.pr_nak < 0.0 {
            return Err(Error::InvalidParameter {
                name: "PR_NaK",
                value: self.pr_nak,
            });
        }
        Ok(())
    }
}

/// The Luo-Rudy I system with reversal potentials and potassium
/// conductances precomputed from a [`ParamSet`].
#[derive(Clone, Debug)]
pub struct Lr1 {
    params: ParamSet,
    e_na: f64,
    e_k: f64,
    e_k1: f64,
    g_k: f64,
    g_k1: f64,
}

/// Validates `params` and builds the system `F(λ, u) = Φ(λ, η*, u)`.
pub fn lr1_system(params: ParamSet) -> Result<Lr1, Error> {
    Lr1::new(params)
}

/// `(e^{b·x} − 1)/x`, continuous through `x = 0`.
fn expm1_over<T: Real>(x: T, b: f64) -> T {
    if x.value().abs() < SINGULAR_BAND {
        T::cst(b) + T::cst(b * b / 2.0) * x + T::cst(b * b * b / 6.0) * x * x
    } else {
        (T::cst(b) * x).exp_m1() / x
    }
}

/// `1 / (1 + e^x)`.
fn logistic_neg<T: Real>(x: T) -> T {
    T::cst(1.0) / (T::cst(1.0) + x.exp())
}

/// Opening and closing rates `(α, β)` for h, j, m, d, f, X, in that order.
fn gate_rates<T: Real>(v: T) -> [(T, T); 6] {
    let c = T::cst;
    let zero = c(0.0);

    let (ah, bh, aj, bj) = if v.value() < HJ_BRANCH_V {
        let ah = c(0.135) * ((c(80.0) + v) / c(-6.8)).exp();
        let bh = c(3.56) * (c(0.079) * v).exp() + c(3.1e5) * (c(0.35) * v).exp();
        let aj = (c(-1.2714e5) * (c(0.2444) * v).exp() - c(3.474e-5) * (c(-0.04391) * v).exp())
            * (v + c(37.78))
            * logistic_neg(c(0.311) * (v + c(79.23)));
        let bj = c(0.1212) * (c(-0.01052) * v).exp() * logistic_neg(c(-0.1378) * (v + c(40.14)));
        (ah, bh, aj, bj)
    } else {
        let bh = c(1.0 / 0.13) * logistic_neg((v + c(10.66)) / c(-11.1));
        let bj = c(0.3) * (c(-2.535e-7) * v).exp() * logistic_neg(c(-0.1) * (v + c(32.0)));
        (zero, bh, zero, bj)
    };

    // α_m = 0.32·x/(1 − e^{−0.1x}), x = V + 47.13
    let am = -c(0.32) / expm1_over(v - c(M_SINGULAR_V), -0.1);
    let bm = c(0.08) * (-v / c(11.0)).exp();

    let ad = c(0.095) * (c(-0.01) * (v - c(5.0))).exp() * logistic_neg(c(-0.072) * (v - c(5.0)));
    let bd = c(0.07) * (c(-0.017) * (v + c(44.0))).exp() * logistic_neg(c(0.05) * (v + c(44.0)));
    let af = c(0.012) * (c(-0.008) * (v + c(28.0))).exp() * logistic_neg(c(0.15) * (v + c(28.0)));
    let bf = c(0.0065) * (c(-0.02) * (v + c(30.0))).exp() * logistic_neg(c(-0.2) * (v + c(30.0)));
    let ax = c(0.0005) * (c(0.083) * (v + c(50.0))).exp() * logistic_neg(c(0.057) * (v + c(50.0)));
    let bx = c(0.0013) * (c(-0.06) * (v + c(20.0))).exp() * logistic_neg(c(-0.04) * (v + c(20.0)));

    [(ah, bh), (aj, bj), (am, bm), (ad, bd), (af, bf), (ax, bx)]
}

/// Inactivation factor of `I_K`.
fn x_i<T: Real>(v: T) -> T {
    if v.value() <= XI_CUTOFF_V {
        return T::cst(1.0);
    }
    T::cst(2.837) * expm1_over(v - T::cst(XI_SINGULAR_V), 0.04) / (T::cst(0.04) * (v + T::cst(35.0))).exp()
}

impl Lr1 {
    pub fn new(params: ParamSet) -> Result<Self, Error> {
        params.validate()?;
        let rt_f = GAS_CONSTANT * params.t / FARADAY;
        let e_na = rt_f * libm::log(params.na_o / params.na_i);
        let e_k = rt_f
            * libm::log(
                (params.k_o + params.pr_nak * params.na_o) / (params.k_i + params.pr_nak * params.na_i),
            );
        let e_k1 = rt_f * libm::log(params.k_o / params.k_i);
        let k_scale = libm::sqrt(params.k_o / K_O_REF);
        Ok(Self {
            g_k: params.g_k * k_scale,
            g_k1: params.g_k1 * k_scale,
            params,
            e_na,
            e_k,
            e_k1,
        })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    /// Reversal potentials `(E_Na, E_K, E_K1)`; `E_Kp = E_K1`.
    pub fn reversal_potentials(&self) -> (f64, f64, f64) {
        (self.e_na, self.e_k, self.e_k1)
    }

    /// Steady-state gate values `α/(α+β)` for h, j, m, d, f, X at voltage `v`.
    pub fn gate_steady_state(&self, v: f64) -> [f64; 6] {
        gate_rates(v).map(|(a, b)| a / (a + b))
    }

    /// Rates `(α, β)` for h, j, m, d, f, X.
    pub fn gate_rates(&self, v: f64) -> [(f64, f64); 6] {
        gate_rates(v)
    }

    /// State with the given voltage and calcium and every gate at its
    /// voltage steady state.
    pub fn gated_state(&self, v: f64, ca_i: f64) -> Vec<f64> {
        let mut u = vec![v, ca_i];
        u.extend_from_slice(&self.gate_steady_state(v));
        u
    }

    /// The full vector field `Φ(η, u)` with `I_st` taken from the parameters.
    pub fn phi(&self, u: &[f64]) -> Result<Vec<f64>, Error> {
        self.eval(self.params.i_st, u)
    }

    fn field<T: Real>(&self, lambda: T, u: &[T]) -> Result<[T; DIM], Error> {
        let c = T::cst;
        let p = &self.params;
        let v = u[idx::V];
        let ca = u[idx::CA];
        if !(ca.value() > 0.0) {
            return Err(Error::DomainViolation {
                what: "intracellular calcium must be positive",
                value: ca.value(),
            });
        }
        let rates = gate_rates(v);

        let (h, j, m) = (u[idx::H], u[idx::J], u[idx::M]);
        let (d, f, x) = (u[idx::D], u[idx::F], u[idx::X]);

        let i_na = c(p.g_na) * m.powi3() * h * j * (v - c(self.e_na));
        let i_si = c(p.g_si) * d * f * (v - c(C1) + c(C2) * ca.ln());
        let i_k = c(self.g_k) * x * x_i(v) * (v - c(self.e_k));

        let dv1 = v - c(self.e_k1);
        let a_k1 = c(1.02) * logistic_neg(c(0.2385) * (dv1 - c(59.215)));
        let b_k1 = (c(0.49124) * (c(0.08032) * (dv1 + c(5.476))).exp()
            + (c(0.06175) * (dv1 - c(594.31))).exp())
            * logistic_neg(c(-0.5143) * (dv1 + c(4.753)));
        let k1_inf = a_k1 / (a_k1 + b_k1);
        let i_k1 = c(self.g_k1) * k1_inf * dv1;

        let kp = logistic_neg((c(7.488) - v) / c(5.98));
        let i_kp = c(p.g_kp) * kp * dv1;
        let i_b = c(p.g_b) * (v - c(p.e_b));

        let total = lambda + i_na + i_si + i_k + i_k1 + i_kp + i_b;
        let mut out = [c(0.0); DIM];
        out[idx::V] = -total / c(p.c_m);
        out[idx::CA] = -c(C3) * i_si + c(C4) * (c(C5) - ca);
        for (k, (a, b)) in rates.into_iter().enumerate() {
            let g = u[idx::H + k];
            out[idx::H + k] = a - (a + b) * g;
        }
        if let Some(bad) = out.iter().find(|z| !z.is_finite()) {
            return Err(Error::DomainViolation {
                what: "rate function overflow",
                value: bad.value(),
            });
        }
        Ok(out)
    }
}

impl System for Lr1 {
    fn dim(&self) -> usize {
        DIM
    }

    fn name(&self) -> &str {
        "lr1"
    }

    fn eval(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        Ok(self.field(lambda, u)?.to_vec())
    }

    fn jac_u(&self, lambda: f64, u: &[f64]) -> Result<DenseMatrix, Error> {
        check_dim(self, u)?;
        let mut jac = DenseMatrix::zeros(DIM, DIM);
        let mut x: [Dual<f64>; DIM] = core::array::from_fn(|i| Dual::constant(u[i]));
        let l = Dual::constant(lambda);
        for col in 0..DIM {
            x[col].eps = 1.0;
            let out = self.field(l, &x)?;
            x[col].eps = 0.0;
            for (row, z) in out.iter().enumerate() {
                jac[(row, col)] = z.eps;
            }
        }
        Ok(jac)
    }

    fn jac_lambda(&self, lambda: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        let x: [Dual<f64>; DIM] = core::array::from_fn(|i| Dual::constant(u[i]));
        let out = self.field(Dual::new(lambda, 1.0), &x)?;
        Ok(out.iter().map(|z| z.eps).collect())
    }

    fn second_directional(&self, lambda: f64, u: &[f64], h: &[f64]) -> Result<DenseMatrix, Error> {
        check_dim(self, u)?;
        check_dim(self, h)?;
        type D2 = Dual<Dual<f64>>;
        let mut x: [D2; DIM] =
            core::array::from_fn(|i| Dual::new(Dual::new(u[i], h[i]), Dual::constant(0.0)));
        let l: D2 = Dual::constant(Dual::constant(lambda));
        let mut out = DenseMatrix::zeros(DIM, DIM);
        for col in 0..DIM {
            x[col].eps.re = 1.0;
            let f = self.field(l, &x)?;
            x[col].eps.re = 0.0;
            for (row, z) in f.iter().enumerate() {
                out[(row, col)] = z.eps.eps;
            }
        }
        Ok(out)
    }

    fn mixed_lambda(&self, lambda: f64, u: &[f64], h: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self, u)?;
        check_dim(self, h)?;
        let x: [Dual<Dual<f64>>; DIM] =
            core::array::from_fn(|i| Dual::new(Dual::new(u[i], h[i]), Dual::constant(0.0)));
        let l = Dual::new(Dual::constant(lambda), Dual::constant(1.0));
        let f = self.field(l, &x)?;
        Ok(f.iter().map(|z| z.eps.eps).collect())
    }

    fn state_scale(&self) -> Vec<f64> {
        let mut s = vec![1.0; DIM];
        s[idx::CA] = 1e-6;
        s
    }
}
