//! Numerical oracles: the reservoir memory-kernel integral (quadrature vs
//! triangular closed form) and the half-line delta-model demonstration.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::couplings::kappa_c;
use crate::error::Result;
use crate::grid::FrequencyGrid;
use crate::mirror::{CavitySpec, C_LIGHT};

/// Which piece of the triangular closed form applies at `s = τ − x/c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelBranch {
    /// `s < −2L/c`: causally before the photon round trip, kernel vanishes.
    OutsideEarly,
    /// `−2L/c ≤ s < 0`: rising edge of the triangle.
    Rising,
    /// `0 ≤ s ≤ 2L/c`: falling edge.
    Falling,
    /// `s > 2L/c`: memory exhausted, kernel vanishes.
    OutsideLate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelResult {
    pub tau: f64,
    pub x: f64,
    pub value: C64,
    pub branch: KernelBranch,
}

/// Half-width of the kernel support in time: one cavity round trip.
pub fn kernel_support(cavity: &CavitySpec) -> f64 {
    2.0 * cavity.length / C_LIGHT
}

/// Peak magnitude of the kernel, reached at s = 0.
pub fn kernel_peak(cavity: &CavitySpec) -> f64 {
    cavity.gamma_c * C_LIGHT / (2.0 * cavity.length)
}

/// Closed form of K(τ,x) = ∫|κ_c(ω)|² e^(−iω(τ−x/c)) dω: a triangle of
/// half-width 2L/c carrying the carrier phase e^(−iω_c s).
pub fn kernel_closed_form(tau: f64, x: f64, cavity: &CavitySpec) -> KernelResult {
    let s = tau - x / C_LIGHT;
    let width = kernel_support(cavity);
    let branch = if s < -width {
        KernelBranch::OutsideEarly
    } else if s < 0.0 {
        KernelBranch::Rising
    } else if s <= width {
        KernelBranch::Falling
    } else {
        KernelBranch::OutsideLate
    };
    let value = match branch {
        KernelBranch::OutsideEarly | KernelBranch::OutsideLate => C64::new(0.0, 0.0),
        _ => {
            let envelope = kernel_peak(cavity) * (1.0 - s.abs() / width);
            envelope * C64::new(0.0, -cavity.omega_c * s).exp()
        }
    };
    KernelResult { tau, x, value, branch }
}

/// Direct composite-Simpson quadrature of the kernel over the grid window.
/// The caller is responsible for a window wide enough that the truncated
/// sinc² tails are negligible (relative weight (c/L)/(π·half_width)).
pub fn kernel_quadrature(tau: f64, x: f64, cavity: &CavitySpec, grid: &FrequencyGrid) -> C64 {
    let s = tau - x / C_LIGHT;
    let f = |omega: f64| -> C64 {
        kappa_c(omega, cavity).norm_sqr() * C64::new(0.0, -omega * s).exp()
    };
    let n = grid.points.len();
    let h = grid.d_omega;
    if n < 3 || n % 2 == 0 {
        // trapezoid fallback for grids Simpson cannot tile
        let mut acc = C64::new(0.0, 0.0);
        for w in grid.points.windows(2) {
            acc += 0.5 * h * (f(w[0]) + f(w[1]));
        }
        return acc;
    }
    let mut acc = f(grid.points[0]) + f(grid.points[n - 1]);
    for (i, &w) in grid.points.iter().enumerate().take(n - 1).skip(1) {
        acc += f(w) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// Coarse-grained time integral of the kernel over its support, evaluated
/// as the two-panel trapezoid on the branch nodes {−2L/c, 0, 2L/c}. On a
/// cavity resonance the node phases are unity and the result is Γ_c; this
/// is the Markov limit in which the kernel acts as Γ_c·δ(τ − x/c).
/// (The exact integral of the oscillating triangle vanishes; the coarse
/// graining over the round-trip time is what produces the delta weight.)
pub fn kernel_time_integral_coarse(cavity: &CavitySpec) -> f64 {
    let width = kernel_support(cavity);
    let nodes = [-width, 0.0, width];
    let values: Vec<C64> =
        nodes.iter().map(|&s| kernel_closed_form(s, 0.0, cavity).value).collect();
    let integral = 0.5 * width * (values[0] + values[1]) + 0.5 * width * (values[1] + values[2]);
    integral.re
}

/// Adaptive Simpson quadrature with absolute tolerance.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// ∫_{−∞}^{0} c(t)·h_ε^a(t) dt for the box model h_ε^a = 1/ε on
/// [(a−1)ε, aε]: the half-line integral that the symmetric delta rule
/// would assign the value c(0)/2.
pub fn delta_half_line(a: f64, eps: f64, c: &impl Fn(f64) -> f64) -> f64 {
    adaptive_simpson(c, (a - 1.0) * eps, 0.0, 1e-12) / eps
}

/// Full-line counterpart ∫ c·h_ε^a dt, which tends to c(0) for any a.
pub fn delta_full_line(a: f64, eps: f64, c: &impl Fn(f64) -> f64) -> f64 {
    adaptive_simpson(c, (a - 1.0) * eps, a * eps, 1e-12) / eps
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaLimit {
    /// (ε, half-line value) pairs, in the order supplied.
    pub samples: Vec<(f64, f64)>,
    /// Richardson-extrapolated ε → 0 limit from the two smallest ε.
    pub limit: f64,
    /// Log-log slope of |value − limit| vs ε; 1 for smooth test functions
    /// with c′(0) ≠ 0.
    pub slope: Option<f64>,
}

/// Evaluate the half-line integral along a decreasing ε sequence and
/// extrapolate the limit, demonstrating the model-dependent value
/// (1 − a)·c(0).
pub fn delta_model_limit(a: f64, eps_sequence: &[f64], c: &impl Fn(f64) -> f64) -> DeltaLimit {
    assert!(
        (0.0..1.0).contains(&a) && a > 0.0,
        "delta model parameter a must lie in (0,1)"
    );
    let samples: Vec<(f64, f64)> =
        eps_sequence.iter().map(|&eps| (eps, delta_half_line(a, eps, c))).collect();
    let n = samples.len();
    let limit = if n >= 2 {
        // first-order Richardson using the ratio of the two smallest ε
        let (e1, v1) = samples[n - 2];
        let (e2, v2) = samples[n - 1];
        let r = e1 / e2;
        (r * v2 - v1) / (r - 1.0)
    } else {
        samples[0].1
    };
    let fit: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, v)| (v - limit).abs() > 1e-13)
        .map(|&(e, v)| (e.ln(), (v - limit).abs().ln()))
        .collect();
    let slope = if fit.len() >= 2 {
        let n = fit.len() as f64;
        let (sx, sy): (f64, f64) = fit.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
        let sxx: f64 = fit.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = fit.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };
    DeltaLimit { samples, limit, slope }
}

/// Default ε sequence of the delta demonstration.
pub fn default_eps_sequence() -> Vec<f64> {
    vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
}

/// Cavity and window used by the kernel oracle: short enough that the
/// sinc² tails fit in a tractable quadrature window, resonant index high
/// enough that the window stays on the positive frequency axis.
pub fn kernel_test_setup() -> Result<(CavitySpec, FrequencyGrid)> {
    let cavity = CavitySpec::single_layer(0.05, 2200, 2.5)?;
    let grid = FrequencyGrid::new(cavity.omega_c, 130_000.0, 260_001)?;
    Ok((cavity, grid))
}
