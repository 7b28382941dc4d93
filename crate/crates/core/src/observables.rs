//! Physical observables: photon flux, cumulative photon number, outgoing
//! spectra, and the reservoir-based (Poynting) flux cross-check.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::couplings::kappa_c;
use crate::dynamics::{ModelKind, Trajectory};
use crate::error::{Error, Result};
use crate::mirror::{CavitySpec, C_LIGHT};

/// Steady-state criterion on the continuum drift rate, per unit time.
pub const STEADY_STATE_DRIFT: f64 = 1e-6;

/// Photon flux and its cumulative integral over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSeries {
    pub t: Vec<f64>,
    /// Instantaneous flux Φ(t), a rate.
    pub flux: Vec<f64>,
    /// Cumulative photon number n(t), dimensionless.
    pub n: Vec<f64>,
}

impl FluxSeries {
    pub fn from_flux(t: Vec<f64>, flux: Vec<f64>) -> Self {
        let n = cumulative_trapezoid(&t, &flux);
        FluxSeries { t, flux, n }
    }

    pub fn final_n(&self) -> f64 {
        self.n.last().copied().unwrap_or(0.0)
    }
}

/// Outgoing-photon spectrum over the frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    /// Spectral density |𝐜_i|²/dω, the grid-independent output.
    pub density: Vec<f64>,
    /// Raw per-mode populations |𝐜_i|², useful for plotting.
    pub grid_native: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Spectrum {
    /// ∫ P(ω) dω by the trapezoid rule.
    pub fn total_probability(&self) -> f64 {
        trapezoid(&self.omega, &self.density)
    }

    /// Frequency of the maximum of the density (grid-resolved).
    pub fn peak_omega(&self) -> f64 {
        let mut best = 0;
        for (i, &d) in self.density.iter().enumerate() {
            if d > self.density[best] {
                best = i;
            }
        }
        self.omega[best]
    }
}

/// Trapezoid integral over a (possibly non-uniform) abscissa.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Running trapezoid integral, same length as the input.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Flux from the cavity photon population: Φ(t) = Γ_c·P_photon(t).
///
/// Valid for models with a discrete cavity level (inside-outside and
/// pseudo-mode); the true-mode picture has no cavity level to leak from.
pub fn flux_from_population(traj: &Trajectory) -> Result<FluxSeries> {
    if matches!(traj.model, ModelKind::TrueExact | ModelKind::TrueLorentzian) {
        return Err(Error::Config(
            "flux_from_population requires a model with a discrete cavity level".into(),
        ));
    }
    let t: Vec<f64> = traj.points.iter().map(|p| p.t).collect();
    let flux: Vec<f64> = traj.points.iter().map(|p| traj.gamma_c * p.p_cavity).collect();
    Ok(FluxSeries::from_flux(t, flux))
}

/// Flux at position `x` outside the cavity, reconstructed from the reservoir
/// amplitudes: Φ(x,t) = (1/Γ_c)|Σ_i √dω κ_c*(ω_i) e^{iω_i x/c} 𝐜_i(t)|².
///
/// In the coarse-grained regime this reproduces Γ_c·P_{f,1}(t − x/c).
/// Requires an inside-outside trajectory recorded with continuum snapshots.
pub fn spectral_flux(traj: &Trajectory, cavity: &CavitySpec, x: f64) -> Result<FluxSeries> {
    if x <= 0.0 {
        return Err(Error::OutsideField(x));
    }
    if traj.model != ModelKind::InsideOutside {
        return Err(Error::Config("spectral_flux requires an inside-outside trajectory".into()));
    }
    let grid = traj.grid.as_ref().ok_or_else(|| Error::Config("trajectory has no grid".into()))?;
    let snapshots = traj
        .snapshots
        .as_ref()
        .ok_or_else(|| Error::Config("trajectory recorded without continuum snapshots".into()))?;

    let sqrt_dw = grid.d_omega.sqrt();
    let weights: Vec<C64> = grid
        .points
        .iter()
        .map(|&w| {
            kappa_c(w, cavity).conj() * sqrt_dw * C64::new(0.0, w * x / C_LIGHT).exp()
        })
        .collect();

    let gamma_c = cavity.gamma_c;
    let mut t = Vec::with_capacity(snapshots.len());
    let mut flux = Vec::with_capacity(snapshots.len());
    for (time, amps) in snapshots {
        let mut field = C64::new(0.0, 0.0);
        for (w, a) in weights.iter().zip(amps) {
            field += w * a;
        }
        t.push(*time);
        flux.push(field.norm_sqr() / gamma_c);
    }
    Ok(FluxSeries::from_flux(t, flux))
}

/// Spectrum of the continuum amplitudes at the final recorded time.
///
/// Attaches a warning when the continuum population was still drifting
/// faster than the steady-state criterion.
pub fn outgoing_spectrum(traj: &Trajectory) -> Result<Spectrum> {
    let grid = traj.grid.as_ref().ok_or_else(|| Error::Config("trajectory has no grid".into()))?;
    let amps = traj
        .final_amps
        .as_ref()
        .ok_or_else(|| Error::Config("trajectory has no continuum amplitudes".into()))?;
    let mut spectrum = crate::grid::spectral_density(amps, grid);
    if let Some(rate) = traj.field_drift_rate() {
        if rate >= STEADY_STATE_DRIFT {
            spectrum.warnings.push(format!(
                "steady state not reached: continuum drift {rate:.3e}/T exceeds {STEADY_STATE_DRIFT:.0e}/T"
            ));
        }
    }
    Ok(spectrum)
}

/// Relative L² distance between two spectra after L²-normalization.
/// The spectra must share a grid.
pub fn l2_mismatch(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.omega.len() != b.omega.len() {
        return Err(Error::Config("spectra live on different grids".into()));
    }
    let norm = |s: &Spectrum| -> f64 { s.density.iter().map(|d| d * d).sum::<f64>().sqrt() };
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Config("cannot normalize an all-zero spectrum".into()));
    }
    let diff: f64 = a
        .density
        .iter()
        .zip(&b.density)
        .map(|(x, y)| {
            let d = x / na - y / nb;
            d * d
        })
        .sum();
    Ok(diff.sqrt())
}

/// Displacement of the spectral peak from a reference frequency.
pub fn peak_shift(spectrum: &Spectrum, omega_ref: f64) -> f64 {
    spectrum.peak_omega() - omega_ref
}
