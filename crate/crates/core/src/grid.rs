//! Uniform discretization of the reservoir continuum and conversion between
//! the dimensionless discrete amplitudes `𝐜(ω_i) = √dω c(ω_i)` and spectral
//! densities.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::Spectrum;
use crate::units::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub center: f64,
    pub half_width: f64,
    pub d_omega: f64,
    pub points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(center: f64, half_width: f64, count: usize) -> Result<Self> {
        if count < 3 {
            return Err(Error::GridCount(count));
        }
        if center - half_width <= 0.0 {
            return Err(Error::GridRange { center, half_width });
        }
        let d_omega = 2.0 * half_width / (count as f64 - 1.0);
        let points = (0..count).map(|i| center - half_width + i as f64 * d_omega).collect();
        Ok(Self { center, half_width, d_omega, points })
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        Self::new(spec.center, spec.half_width, spec.count)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Dimensionless continuum amplitudes aligned with a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitudes {
    pub values: Vec<C64>,
}

impl SpectralAmplitudes {
    pub fn zeros(len: usize) -> Self {
        Self { values: vec![C64::new(0.0, 0.0); len] }
    }

    /// Total continuum population `Σ |𝐜_i|²`.
    pub fn total_probability(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Grid-independent density `P(ω_i) = |𝐜_i|² / dω` together with the
/// grid-native probabilities `|𝐜_i|²`.
pub fn spectral_density(amps: &SpectralAmplitudes, grid: &FrequencyGrid) -> Spectrum {
    debug_assert_eq!(amps.values.len(), grid.len());
    let grid_native: Vec<f64> = amps.values.iter().map(|c| c.norm_sqr()).collect();
    let density = grid_native.iter().map(|p| p / grid.d_omega).collect();
    Spectrum { omega: grid.points.clone(), density, grid_native, warnings: Vec::new() }
}
