//! Single-layer mirror spectral coefficients, the cavity response function
//! `T(ω)`, and its decomposition into Lorentzian modes.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in scaled units (lengths measured in units of `c T`).
pub const C_LIGHT: f64 = 1.0;

/// Single dielectric layer acting as the semi-transparent cavity mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorSpec {
    /// Refractive index of the layer, `n >= 1`.
    pub n: f64,
    /// Layer thickness, default `λ_c / (4 n)` (quarter-wave at resonance).
    pub delta: f64,
    /// Fresnel amplitude `r = (n - 1) / (n + 1)` of a single interface.
    pub r0: f64,
}

impl MirrorSpec {
    /// Quarter-wave layer for a cavity resonant at `omega_c`.
    pub fn quarter_wave(n: f64, omega_c: f64) -> Result<Self> {
        let r0 = fresnel_r(n)?;
        let lambda_c = 2.0 * std::f64::consts::PI * C_LIGHT / omega_c;
        Ok(Self { n, delta: lambda_c / (4.0 * n), r0 })
    }
}

/// Geometry and optical parameters of the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    /// Cavity length in units of `c T`.
    pub length: f64,
    /// Longitudinal mode index (number of antinodes).
    pub mode_index: u32,
    /// Resonance frequency `ω_c ≈ m π c / L`.
    pub omega_c: f64,
    /// Cavity decay rate `Γ_c`.
    pub gamma_c: f64,
    /// Mirror model; absent for purely Lorentzian / pseudo-mode scenarios.
    pub mirror: Option<MirrorSpec>,
}

impl CavitySpec {
    /// Cavity at the bare resonance `ω_c = m π c / L` with a quarter-wave
    /// single-layer mirror of index `n`; `Γ_c` is taken from the mirror via
    /// `Γ = -(c/L) ln|r(ω_c)|`.
    pub fn single_layer(length: f64, mode_index: u32, n: f64) -> Result<Self> {
        let omega_c = mode_index as f64 * std::f64::consts::PI * C_LIGHT / length;
        let mirror = MirrorSpec::quarter_wave(n, omega_c)?;
        let mut cavity = Self { length, mode_index, omega_c, gamma_c: 0.0, mirror: Some(mirror) };
        let (_, r_amp) = layer_coefficients(omega_c, &mirror);
        cavity.gamma_c = -(C_LIGHT / length) * r_amp.norm().ln();
        Ok(cavity)
    }

    /// Free spectral range `Δ_ω = π c / L`.
    pub fn free_spectral_range(&self) -> f64 {
        std::f64::consts::PI * C_LIGHT / self.length
    }

    /// Power reflectivity at resonance, `R = e^{-2 L Γ_c / c}`.
    pub fn resonant_reflectivity(&self) -> f64 {
        (-2.0 * self.length * self.gamma_c / C_LIGHT).exp()
    }
}

/// One Lorentzian term of the mode decomposition of `|T(ω)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianMode {
    pub index: i64,
    pub omega_m: f64,
    pub gamma_m: f64,
}

/// Fresnel amplitude `(n - 1) / (n + 1)` of a single dielectric interface.
pub fn fresnel_r(n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::RefractiveIndex(n));
    }
    Ok((n - 1.0) / (n + 1.0))
}

/// Spectral transmission and reflection amplitudes `(t(ω), r(ω))` of the
/// single layer (two interfaces plus the internal propagation phase).
pub fn layer_coefficients(omega: f64, mirror: &MirrorSpec) -> (C64, C64) {
    let r0 = mirror.r0;
    let phase_n = C64::new(0.0, 2.0 * mirror.n * omega * mirror.delta / C_LIGHT).exp();
    let denom = C64::new(1.0, 0.0) - phase_n * r0 * r0;
    let t_amp = C64::new(0.0, (mirror.n - 1.0) * omega * mirror.delta / C_LIGHT).exp()
        * (1.0 - r0 * r0)
        / denom;
    let r_amp = C64::new(0.0, -omega * mirror.delta / C_LIGHT).exp() * r0 * (phase_n - 1.0) / denom;
    (t_amp, r_amp)
}

/// Exact cavity response `T(ω) = t(ω) / (1 + r(ω) e^{2i(ω/c)(L + δ/2)})`.
pub fn response_t(omega: f64, cavity: &CavitySpec) -> Result<C64> {
    let mirror = cavity.mirror.as_ref().ok_or(Error::MissingMirror)?;
    let (t_amp, r_amp) = layer_coefficients(omega, mirror);
    let round_trip =
        C64::new(0.0, 2.0 * (omega / C_LIGHT) * (cavity.length + mirror.delta / 2.0)).exp();
    Ok(t_amp / (C64::new(1.0, 0.0) + r_amp * round_trip))
}

/// Solve the implicit resonance condition of `T(ω)`, i.e.
/// `2(ω/c)(L + δ/2) + φ_r(ω) = (2m + 1)π`, by a damped fixed point seeded
/// at `m π c / L`; the reflection phase varies slowly so a damping of 0.5
/// converges quickly. With the mirror phase included, a quarter-wave layer
/// resonates exactly at `m π c / L`.
fn solve_mode(index: i64, cavity: &CavitySpec, mirror: &MirrorSpec) -> Result<LorentzianMode> {
    const MAX_ITER: usize = 100;
    const DAMPING: f64 = 0.5;
    let pi = std::f64::consts::PI;
    let fsr = cavity.free_spectral_range();
    let round_trip_len = 2.0 * (cavity.length + mirror.delta / 2.0);
    let mut omega = index as f64 * fsr;
    for _ in 0..MAX_ITER {
        let (_, r_amp) = layer_coefficients(omega, mirror);
        // unwrap the reflection phase into [0, 2π); it stays near π
        let phi_r = r_amp.arg().rem_euclid(2.0 * pi);
        let target = ((2 * index + 1) as f64 * pi - phi_r) * C_LIGHT / round_trip_len;
        let next = omega + DAMPING * (target - omega);
        if (next - omega).abs() <= 1e-12 * omega.abs().max(1.0) {
            let (_, r_res) = layer_coefficients(next, mirror);
            let gamma_m = -(C_LIGHT / cavity.length) * r_res.norm().ln();
            return Ok(LorentzianMode { index, omega_m: next, gamma_m });
        }
        omega = next;
    }
    Err(Error::ModeSearch { index, iterations: MAX_ITER })
}

/// All Lorentzian modes with resonance inside `band = (lo, hi)`.
pub fn lorentzian_modes(cavity: &CavitySpec, band: (f64, f64)) -> Result<Vec<LorentzianMode>> {
    let mirror = cavity.mirror.as_ref().ok_or(Error::MissingMirror)?;
    let fsr = cavity.free_spectral_range();
    let (lo, hi) = band;
    let m_lo = ((lo / fsr).floor() as i64).max(1);
    let m_hi = (hi / fsr).ceil() as i64;
    let mut modes = Vec::new();
    for index in m_lo..=m_hi {
        let mode = solve_mode(index, cavity, mirror)?;
        if mode.omega_m >= lo && mode.omega_m <= hi {
            modes.push(mode);
        }
    }
    Ok(modes)
}

/// `|T(ω)|²` reconstructed from the Lorentzian decomposition, keeping
/// `neighbors` modes on each side of the cavity resonance index.
pub fn lorentzian_t2(omega: f64, cavity: &CavitySpec, neighbors: usize) -> Result<f64> {
    let m0 = cavity.mode_index as i64;
    let fsr = cavity.free_spectral_range();
    let lo = ((m0 - neighbors as i64).max(1) as f64 - 0.5) * fsr;
    let hi = ((m0 + neighbors as i64) as f64 + 0.5) * fsr;
    let modes = lorentzian_modes(cavity, (lo, hi))?;
    let mut sum = 0.0;
    for mode in &modes {
        let d = omega - mode.omega_m;
        sum += (C_LIGHT / (2.0 * cavity.length)) * mode.gamma_m
            / (d * d + 0.25 * mode.gamma_m * mode.gamma_m);
    }
    Ok(sum)
}

/// Finesse `(π c / L) / Γ_c` and quality factor `Q = ω_c / Γ_c`.
pub fn finesse_and_q(cavity: &CavitySpec) -> (f64, f64) {
    (cavity.free_spectral_range() / cavity.gamma_c, cavity.omega_c / cavity.gamma_c)
}
