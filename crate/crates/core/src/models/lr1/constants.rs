//! Fixed constants of the Luo-Rudy I (1991) ventricular myocyte model.
//!
//! Conductances, concentrations and temperature are parameters (see
//! [`ParamSet`](super::ParamSet)); everything here is structural. Units:
//! mV, ms, µA/cm², mS/cm², mM, K.

/// Gas constant, mJ/(mol·K).
pub const GAS_CONSTANT: f64 = 8314.0;
/// Faraday constant, C/mol.
pub const FARADAY: f64 = 96484.6;

/// Slow-inward reversal potential `E_si = C1 − C2·ln[Ca]_i`, so the
/// driving force is `V − C1 + C2·ln[Ca]_i`.
pub const C1: f64 = 7.7;
pub const C2: f64 = 13.0287;
/// Calcium uptake: `d[Ca]_i/dt = −C3·I_si + C4·(C5 − [Ca]_i)`.
pub const C3: f64 = 1e-4;
pub const C4: f64 = 0.07;
pub const C5: f64 = 1e-4;

/// `g_K` and `g_K1` scale with `√([K]_o / K_O_REF)`.
pub const K_O_REF: f64 = 5.4;

/// Voltage at which the `h` and `j` rate expressions switch branch.
pub const HJ_BRANCH_V: f64 = -40.0;
/// `X_i` is 1 at and below this voltage.
pub const XI_CUTOFF_V: f64 = -100.0;

/// Removable singularity of `α_m`: `V = −47.13`.
pub const M_SINGULAR_V: f64 = -47.13;
/// Removable singularity of `X_i`: `V = −77`.
pub const XI_SINGULAR_V: f64 = -77.0;

/// Below this distance from a removable singularity the quotient is
/// replaced by its Taylor expansion.
pub const SINGULAR_BAND: f64 = 1e-7;

// Default parameter set.
pub const DEFAULT_C_M: f64 = 1.0;
pub const DEFAULT_G_NA: f64 = 23.0;
pub const DEFAULT_G_SI: f64 = 0.09;
pub const DEFAULT_G_K: f64 = 0.282;
pub const DEFAULT_G_K1: f64 = 0.6047;
pub const DEFAULT_G_KP: f64 = 0.0183;
pub const DEFAULT_G_B: f64 = 0.03921;
pub const DEFAULT_NA_O: f64 = 140.0;
pub const DEFAULT_NA_I: f64 = 18.0;
pub const DEFAULT_K_O: f64 = 5.4;
pub const DEFAULT_K_I: f64 = 145.0;
pub const DEFAULT_PR_NAK: f64 = 0.01833;
pub const DEFAULT_E_B: f64 = -59.87;
pub const DEFAULT_T: f64 = 310.0;
