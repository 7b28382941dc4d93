//! Single-excitation dynamics of the three representations: true-mode,
//! inside-outside, and pseudo-mode.
//!
//! All diagonal frequencies are bookkept as detunings from `ω_c`, which
//! removes the fast optical scale from the integrator; couplings are still
//! evaluated at the absolute frequencies.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::couplings::{eta, kappa_c, CouplingMode, CouplingSet};
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, SpectralAmplitudes};
use crate::rk4;
use crate::units::{DriveEnvelope, InitialState, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// True-mode equations with the exact multi-mode coupling `η(ω)`.
    TrueExact,
    /// True-mode equations with the Lorentzian coupling `η̂(ω)`; its final
    /// spectrum is the pseudo-mode outgoing spectrum.
    TrueLorentzian,
    /// Perfect cavity plus reservoir, coupled by `κ_c(ω)`.
    InsideOutside,
    /// Non-Hermitian three-level model with leak bookkeeping.
    PseudoMode,
}

impl ModelKind {
    pub fn uses_grid(&self) -> bool {
        !matches!(self, ModelKind::PseudoMode)
    }

    /// Number of discrete (non-continuum) amplitudes in the state layout.
    fn head_len(&self) -> usize {
        match self {
            ModelKind::TrueExact | ModelKind::TrueLorentzian => 2,
            ModelKind::InsideOutside => 3,
            // [c_g, c_e, c_f1, leak accumulator]
            ModelKind::PseudoMode => 4,
        }
    }
}

/// Precomputed coefficients of the continuum models.
pub struct ContinuumParams {
    pub delta: f64,
    pub delta_c: f64,
    pub drive: DriveEnvelope,
    /// `ω_i - ω_c` per grid point.
    pub detunings: Vec<f64>,
    /// `√dω × coupling(ω_i)`: `η` for the true-mode system, `κ_c` for the
    /// inside-outside system.
    pub coupling_disc: Vec<C64>,
    /// Atom-cavity coupling (inside-outside only).
    pub g: f64,
}

/// Parameters of the pseudo-mode (non-Hermitian) model.
pub struct PseudoParams {
    pub delta: f64,
    pub delta_c: f64,
    pub drive: DriveEnvelope,
    pub g: f64,
    pub gamma_c: f64,
}

const I: C64 = C64::new(0.0, 1.0);

/// True-mode right-hand side; state layout `[c_g, c_e, 𝐜_1.., 𝐜_m]`.
pub fn rhs_truemode(t: f64, state: &[C64], deriv: &mut [C64], p: &ContinuumParams) {
    let omega_t = p.drive.value(t);
    let (c_g, c_e) = (state[0], state[1]);
    deriv[0] = -I * omega_t * c_e;
    let mut sum = C64::new(0.0, 0.0);
    for (amp, coupling) in state[2..].iter().zip(&p.coupling_disc) {
        sum += coupling * amp;
    }
    deriv[1] = -I * (p.delta * c_e + omega_t * c_g) + sum;
    let base = p.delta - p.delta_c;
    for i in 0..p.detunings.len() {
        deriv[2 + i] =
            -I * (base + p.detunings[i]) * state[2 + i] - p.coupling_disc[i].conj() * c_e;
    }
}

/// Inside-outside right-hand side; state layout `[c_g, c_e, c_f10, 𝐜..]`.
pub fn rhs_inside_outside(t: f64, state: &[C64], deriv: &mut [C64], p: &ContinuumParams) {
    let omega_t = p.drive.value(t);
    let (c_g, c_e, c_cav) = (state[0], state[1], state[2]);
    deriv[0] = -I * omega_t * c_e;
    deriv[1] = -I * (p.delta * c_e + omega_t * c_g + p.g * c_cav);
    let mut sum = C64::new(0.0, 0.0);
    for (amp, coupling) in state[3..].iter().zip(&p.coupling_disc) {
        sum += coupling.conj() * amp;
    }
    let base = p.delta - p.delta_c;
    deriv[2] = -I * (base * c_cav + p.g * c_e) - sum;
    for i in 0..p.detunings.len() {
        deriv[3 + i] =
            -I * (base + p.detunings[i]) * state[3 + i] + p.coupling_disc[i] * c_cav;
    }
}

/// Pseudo-mode right-hand side; state layout `[c_g, c_e, c_f1, n_leaked]`.
/// The leak accumulator integrates `Γ_c |c_f1|²` alongside, dilating the
/// lossy system back to a conserved one.
pub fn rhs_pseudomode(t: f64, state: &[C64], deriv: &mut [C64], p: &PseudoParams) {
    let omega_t = p.drive.value(t);
    let (c_g, c_e, c_f1) = (state[0], state[1], state[2]);
    deriv[0] = -I * omega_t * c_e;
    deriv[1] = -I * (p.delta * c_e + omega_t * c_g + p.g * c_f1);
    deriv[2] = (-I * (p.delta - p.delta_c) - 0.5 * p.gamma_c) * c_f1 - I * p.g * c_e;
    deriv[3] = C64::new(p.gamma_c * c_f1.norm_sqr(), 0.0);
}

/// Scalar observables recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub p_g: f64,
    pub p_e: f64,
    /// Photon population of the discrete cavity level (`|c_{f,1,0}|²`
    /// inside-outside, `|ĉ_{f,1}|²` pseudo-mode, zero for true-mode).
    pub p_cavity: f64,
    /// Total continuum population `Σ|𝐜_i|²`.
    pub p_field: f64,
    /// Cumulative leak `Γ_c ∫|ĉ_{f,1}|²` (pseudo-mode only).
    pub n_leaked: f64,
}

impl TrajectoryPoint {
    /// Closed-system (or dilated) probability total.
    pub fn total(&self) -> f64 {
        self.p_g + self.p_e + self.p_cavity + self.p_field + self.n_leaked
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: ModelKind,
    pub gamma_c: f64,
    pub points: Vec<TrajectoryPoint>,
    pub grid: Option<FrequencyGrid>,
    /// Continuum amplitudes at the final time (grid models).
    pub final_amps: Option<SpectralAmplitudes>,
    /// Optional decimated history of the continuum amplitudes, for the
    /// spectral (Poynting-based) flux cross-check.
    pub snapshots: Option<Vec<(f64, Vec<C64>)>>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn final_point(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory records at least the initial point")
    }

    /// `|d/dt Σ|𝐜_i|²|` averaged over the last unit of time; the steady
    /// state criterion requires this to be below `1e-6`.
    pub fn field_drift_rate(&self) -> Option<f64> {
        let last = self.points.last()?;
        let earlier = self
            .points
            .iter()
            .rev()
            .find(|p| last.t - p.t >= 1.0)
            .or_else(|| self.points.first())?;
        let span = last.t - earlier.t;
        if span <= 0.0 {
            return None;
        }
        let field = |p: &TrajectoryPoint| p.p_field + p.p_cavity + p.n_leaked;
        Some(((field(last) - field(earlier)) / span).abs())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Store decimated continuum snapshots (memory-heavy on fine grids).
    pub store_snapshots: bool,
}

fn continuum_params(model: ModelKind, config: &ScenarioConfig, grid: &FrequencyGrid) -> Result<ContinuumParams> {
    let sqrt_dw = grid.d_omega.sqrt();
    let detunings: Vec<f64> = grid.points.iter().map(|w| w - config.cavity.omega_c).collect();
    let coupling_disc = match model {
        ModelKind::TrueExact | ModelKind::TrueLorentzian => {
            let mode = if model == ModelKind::TrueExact {
                CouplingMode::Exact
            } else {
                CouplingMode::Lorentzian
            };
            let set = CouplingSet {
                g: config.atom.g,
                cavity: config.cavity,
                x_atom: config.atom.x_atom,
                mode,
            };
            grid.points
                .iter()
                .map(|&w| eta(w, &set).map(|v| v * sqrt_dw))
                .collect::<Result<Vec<_>>>()?
        }
        ModelKind::InsideOutside => grid
            .points
            .iter()
            .map(|&w| kappa_c(w, &config.cavity) * sqrt_dw)
            .collect(),
        ModelKind::PseudoMode => unreachable!("pseudo-mode has no continuum"),
    };
    Ok(ContinuumParams {
        delta: config.atom.delta,
        delta_c: config.atom.delta_c,
        drive: config.atom.drive.clone(),
        detunings,
        coupling_disc,
        g: config.atom.g,
    })
}

fn initial_head(model: ModelKind, initial: InitialState) -> Vec<C64> {
    let mut head = vec![C64::new(0.0, 0.0); model.head_len()];
    match initial {
        InitialState::Ground => head[0] = C64::new(1.0, 0.0),
        InitialState::Excited => head[1] = C64::new(1.0, 0.0),
    }
    head
}

/// Integrate a scenario with the initial state taken from the config.
pub fn run(model: ModelKind, config: &ScenarioConfig, opts: &RunOptions) -> Result<Trajectory> {
    let head = initial_head(model, config.initial_state);
    run_with_initial(model, config, opts, &head)
}

/// Integrate a scenario from an explicit discrete-level initial state
/// (`[c_g, c_e]`, `[c_g, c_e, c_f10]`, or `[c_g, c_e, c_f1, leak]` depending
/// on the model); continuum amplitudes start in vacuum.
pub fn run_with_initial(
    model: ModelKind,
    config: &ScenarioConfig,
    opts: &RunOptions,
    head: &[C64],
) -> Result<Trajectory> {
    let warnings = config.validate()?;
    let head_len = model.head_len();
    if head.len() != head_len {
        return Err(Error::Config(format!(
            "initial state has {} discrete amplitudes, model expects {head_len}",
            head.len()
        )));
    }

    let grid = if model.uses_grid() {
        Some(FrequencyGrid::from_spec(&config.grid)?)
    } else {
        None
    };
    let dim = head_len + grid.as_ref().map_or(0, FrequencyGrid::len);
    let mut state = vec![C64::new(0.0, 0.0); dim];
    state[..head_len].copy_from_slice(head);

    let dt = config.integrator.dt;
    let steps = ((config.tf - config.t0) / dt).round() as usize;

    let mut points = Vec::new();
    let mut snapshots: Option<Vec<(f64, Vec<C64>)>> =
        if opts.store_snapshots && model.uses_grid() { Some(Vec::new()) } else { None };

    let gamma_c = config.cavity.gamma_c;
    {
        let mut observe = |t: f64, s: &[C64]| {
            let p_field: f64 = s[head_len..].iter().map(|c| c.norm_sqr()).sum();
            let point = match model {
                ModelKind::TrueExact | ModelKind::TrueLorentzian => TrajectoryPoint {
                    t,
                    p_g: s[0].norm_sqr(),
                    p_e: s[1].norm_sqr(),
                    p_cavity: 0.0,
                    p_field,
                    n_leaked: 0.0,
                },
                ModelKind::InsideOutside => TrajectoryPoint {
                    t,
                    p_g: s[0].norm_sqr(),
                    p_e: s[1].norm_sqr(),
                    p_cavity: s[2].norm_sqr(),
                    p_field,
                    n_leaked: 0.0,
                },
                ModelKind::PseudoMode => TrajectoryPoint {
                    t,
                    p_g: s[0].norm_sqr(),
                    p_e: s[1].norm_sqr(),
                    p_cavity: s[2].norm_sqr(),
                    p_field: 0.0,
                    n_leaked: s[3].re,
                },
            };
            points.push(point);
            if let Some(store) = snapshots.as_mut() {
                store.push((t, s[head_len..].to_vec()));
            }
        };

        match model {
            ModelKind::TrueExact | ModelKind::TrueLorentzian => {
                let params = continuum_params(model, config, grid.as_ref().unwrap())?;
                rk4::integrate(
                    |t, s, d| rhs_truemode(t, s, d, &params),
                    &mut state,
                    config.t0,
                    dt,
                    steps,
                    config.integrator.record_every,
                    &mut observe,
                )?;
            }
            ModelKind::InsideOutside => {
                let params = continuum_params(model, config, grid.as_ref().unwrap())?;
                rk4::integrate(
                    |t, s, d| rhs_inside_outside(t, s, d, &params),
                    &mut state,
                    config.t0,
                    dt,
                    steps,
                    config.integrator.record_every,
                    &mut observe,
                )?;
            }
            ModelKind::PseudoMode => {
                let params = PseudoParams {
                    delta: config.atom.delta,
                    delta_c: config.atom.delta_c,
                    drive: config.atom.drive.clone(),
                    g: config.atom.g,
                    gamma_c,
                };
                rk4::integrate(
                    |t, s, d| rhs_pseudomode(t, s, d, &params),
                    &mut state,
                    config.t0,
                    dt,
                    steps,
                    config.integrator.record_every,
                    &mut observe,
                )?;
            }
        }
    }

    let final_amps = if model.uses_grid() {
        Some(SpectralAmplitudes { values: state[head_len..].to_vec() })
    } else {
        None
    };

    Ok(Trajectory { model, gamma_c, points, grid, final_amps, snapshots, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{preset, GridSpec, IntegratorSpec};
    use approx::assert_relative_eq;

    fn small_grid_config() -> ScenarioConfig {
        let mut cfg = preset("fig3a").unwrap();
        cfg.grid = GridSpec { center: cfg.cavity.omega_c, half_width: 40.0, count: 401 };
        cfg.integrator = IntegratorSpec { dt: 0.0025, record_every: 40 };
        cfg.tf = 5.0;
        cfg
    }

    #[test]
    fn ground_state_is_dark_without_drive() {
        let mut cfg = small_grid_config();
        cfg.initial_state = InitialState::Ground;
        let traj = run(ModelKind::TrueExact, &cfg, &RunOptions::default()).unwrap();
        let last = traj.final_point();
        assert_relative_eq!(last.p_g, 1.0, epsilon = 1e-12);
        assert!(last.p_e < 1e-20);
    }

    #[test]
    fn decoupled_excited_state_is_static() {
        let mut cfg = small_grid_config();
        cfg.atom.g = 0.0;
        let traj = run(ModelKind::TrueExact, &cfg, &RunOptions::default()).unwrap();
        assert_relative_eq!(traj.final_point().p_e, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rabi_oscillation_in_closed_jaynes_cummings_limit() {
        // κ scale = 0 (Γ_c = 0) closes the system: P_e(t) = cos²(gt)
        let mut cfg = small_grid_config();
        cfg.cavity.gamma_c = 0.0;
        cfg.atom.g = 1.0;
        cfg.tf = 2.0;
        cfg.integrator.dt = 1e-3;
        let traj = run(ModelKind::InsideOutside, &cfg, &RunOptions::default()).unwrap();
        for p in &traj.points {
            let expected_e = (1.0_f64 * p.t).cos().powi(2);
            assert!((p.p_e - expected_e).abs() < 1e-6, "t={} p_e={}", p.t, p.p_e);
            assert!((p.p_cavity - (1.0 - expected_e)).abs() < 1e-6);
        }
    }

    #[test]
    fn inside_outside_norm_conserved() {
        let cfg = small_grid_config();
        let traj = run(ModelKind::InsideOutside, &cfg, &RunOptions::default()).unwrap();
        for p in &traj.points {
            assert!((p.total() - 1.0).abs() < 1e-6, "t={} total={}", p.t, p.total());
        }
    }

    #[test]
    fn weak_coupling_tail_decays_at_purcell_rate() {
        // deep in the bad-cavity regime the tail of P_{f,1} decays at the
        // effective rate 4g²/Γ_c
        let mut cfg = small_grid_config();
        cfg.atom.g = 0.2;
        cfg.tf = 9.0;
        // resolve the narrow Purcell line: dω ≪ 4g²/Γ_c, recurrence ≫ tf
        cfg.grid = GridSpec { center: cfg.cavity.omega_c, half_width: 10.0, count: 1601 };
        let traj = run(ModelKind::InsideOutside, &cfg, &RunOptions::default()).unwrap();
        let at = |t: f64| -> &TrajectoryPoint {
            traj.points.iter().min_by(|a, b| {
                (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap()
            }).unwrap()
        };
        let (first, last) = (at(4.0), at(8.0));
        let rate = -((last.p_cavity / first.p_cavity).ln()) / (last.t - first.t);
        let purcell = 4.0 * cfg.atom.g.powi(2) / cfg.cavity.gamma_c;
        assert!((rate - purcell).abs() / purcell < 0.1, "rate {rate} vs {purcell}");
    }

    #[test]
    fn pseudo_mode_pure_decay() {
        let mut cfg = preset("fig3a").unwrap();
        cfg.atom.g = 0.0;
        cfg.tf = 3.0;
        cfg.integrator.dt = 1e-3;
        let photon = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let traj =
            run_with_initial(ModelKind::PseudoMode, &cfg, &RunOptions::default(), &photon)
                .unwrap();
        for p in &traj.points {
            let expected = (-cfg.cavity.gamma_c * p.t).exp();
            assert!((p.p_cavity - expected).abs() < 1e-8, "t={}", p.t);
        }
    }

    #[test]
    fn pseudo_mode_dilated_bookkeeping() {
        let cfg = preset("fig4_G60").unwrap();
        let traj = run(ModelKind::PseudoMode, &cfg, &RunOptions::default()).unwrap();
        for p in &traj.points {
            assert!((p.total() - 1.0).abs() < 1e-6, "t={} total={}", p.t, p.total());
        }
    }

    #[test]
    fn stronger_leakage_suppresses_cavity_population() {
        let max_p = |name: &str| -> f64 {
            let cfg = preset(name).unwrap();
            run(ModelKind::PseudoMode, &cfg, &RunOptions::default())
                .unwrap()
                .points
                .iter()
                .map(|p| p.p_cavity)
                .fold(0.0, f64::max)
        };
        assert!(max_p("fig4_G10") > max_p("fig4_G60"));
    }

    #[test]
    fn zero_window_yields_single_record() {
        let mut cfg = small_grid_config();
        cfg.tf = cfg.t0;
        let traj = run(ModelKind::PseudoMode, &cfg, &RunOptions::default()).unwrap();
        assert_eq!(traj.points.len(), 1);
    }

    #[test]
    fn deterministic_repeat() {
        let cfg = small_grid_config();
        let a = run(ModelKind::TrueLorentzian, &cfg, &RunOptions::default()).unwrap();
        let b = run(ModelKind::TrueLorentzian, &cfg, &RunOptions::default()).unwrap();
        assert_eq!(a.final_amps.unwrap().values, b.final_amps.unwrap().values);
    }

    #[test]
    fn rk4_order_check() {
        // halving dt reduces the error roughly 16-fold
        let reference = {
            let mut cfg = preset("fig4_G60").unwrap();
            cfg.tf = 1.0;
            cfg.integrator.dt = 1.25e-5;
            run(ModelKind::PseudoMode, &cfg, &RunOptions::default()).unwrap().final_point().p_g
        };
        let run_dt = |dt: f64| -> f64 {
            let mut cfg = preset("fig4_G60").unwrap();
            cfg.tf = 1.0;
            cfg.integrator.dt = dt;
            (run(ModelKind::PseudoMode, &cfg, &RunOptions::default())
                .unwrap()
                .final_point()
                .p_g
                - reference)
                .abs()
        };
        let ratio = run_dt(8e-4) / run_dt(4e-4);
        assert!((8.0..32.0).contains(&ratio), "order ratio {ratio}");
    }

    #[test]
    fn true_mode_norm_conserved_small() {
        let cfg = small_grid_config();
        let traj = run(ModelKind::TrueExact, &cfg, &RunOptions::default()).unwrap();
        for p in &traj.points {
            assert!((p.total() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn drive_moves_population_out_of_ground() {
        let cfg = preset("fig4_G60").unwrap();
        let traj = run(ModelKind::PseudoMode, &cfg, &RunOptions::default()).unwrap();
        assert!(traj.final_point().n_leaked > 0.1);
        assert!(traj.final_point().p_g < 0.9);
    }
}
