//! The three coupling functions: exact atom-continuum `η(ω)`, its Lorentzian
//! approximation `η̂(ω)`, and the cavity-reservoir coupling `κ_c(ω)`.
//!
//! `η` carries the `-i` phase of the Lorentzian form and `κ_c` the `-i` of
//! the sinc form; a constant phase on either is absorbable into amplitude
//! redefinitions, so comparisons should use magnitudes and relative phases.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mirror::{response_t, CavitySpec, C_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    /// Full multi-mode mirror response; requires a `MirrorSpec`.
    Exact,
    /// Single-Lorentzian cut, parameterized by `(g, ω_c, Γ_c)` only.
    Lorentzian,
}

/// Inputs of the atom-continuum coupling evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub g: f64,
    pub cavity: CavitySpec,
    pub x_atom: f64,
    pub mode: CouplingMode,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Exact structured coupling, in `g`-normalized form:
/// `η(ω) = -i g √(ω/ω_c) √(L/πc) e^{iωL/c} sin(ω(x_A+L)/c) T(ω)`.
pub fn eta_exact(omega: f64, set: &CouplingSet) -> Result<C64> {
    let cavity = &set.cavity;
    let t_resp = response_t(omega, cavity)?;
    let amplitude = set.g
        * (omega / cavity.omega_c).sqrt()
        * (cavity.length / (std::f64::consts::PI * C_LIGHT)).sqrt()
        * (omega * (set.x_atom + cavity.length) / C_LIGHT).sin();
    let phase = C64::new(0.0, omega * cavity.length / C_LIGHT).exp();
    Ok(C64::new(0.0, -1.0) * amplitude * phase * t_resp)
}

/// Lorentzian approximation `η̂(ω) = -i g √(Γ_c/2π) / (ω - ω_c + iΓ_c/2)`.
pub fn eta_lorentzian(omega: f64, set: &CouplingSet) -> C64 {
    let cavity = &set.cavity;
    let num = C64::new(0.0, -set.g * (cavity.gamma_c / (2.0 * std::f64::consts::PI)).sqrt());
    num / C64::new(omega - cavity.omega_c, 0.5 * cavity.gamma_c)
}

/// Coupling dispatch for the configured mode.
pub fn eta(omega: f64, set: &CouplingSet) -> Result<C64> {
    match set.mode {
        CouplingMode::Exact => eta_exact(omega, set),
        CouplingMode::Lorentzian => Ok(eta_lorentzian(omega, set)),
    }
}

/// Cavity-reservoir coupling
/// `κ_c(ω) = -i √(Γ_c/2π) e^{-iωL/c} sinc((ω - ω_c) L / c)`.
pub fn kappa_c(omega: f64, cavity: &CavitySpec) -> C64 {
    let prefactor = (cavity.gamma_c / (2.0 * std::f64::consts::PI)).sqrt();
    let phase = C64::new(0.0, -omega * cavity.length / C_LIGHT).exp();
    C64::new(0.0, -1.0)
        * prefactor
        * phase
        * sinc((omega - cavity.omega_c) * cavity.length / C_LIGHT)
}

/// Value of the pseudo-mode validity indicator `(Γ_c (x_A + L) / c)²`;
/// reported, never gated on.
pub fn pseudo_mode_indicator(set: &CouplingSet) -> f64 {
    let v = set.cavity.gamma_c * (set.x_atom + set.cavity.length) / C_LIGHT;
    v * v
}
