//! Python bindings for the cavity-emission simulator.
//!
//! Exposes the scenario presets, the four dynamical models, the outgoing
//! spectrum, pulse design/validation, and the mirror/coupling scans.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cavsim_core::dynamics::{run, ModelKind, RunOptions};
use cavsim_core::master::{integrate_lindblad, DensityMatrix4, MasterParams};
use cavsim_core::mirror::{lorentzian_t2, response_t};
use cavsim_core::observables::{flux_from_population, outgoing_spectrum};
use cavsim_core::shaping::{
    design_rabi, designed_config, flux_forward, max_effective_coupling, regime_report,
    theta_zeta, validate_against_gaussian, ShapingParams,
};
use cavsim_core::shaping::gaussian_target;
use cavsim_core::units::{preset, InitialState, ScenarioConfig, PRESET_NAMES};
use cavsim_core::{couplings, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_model(name: &str) -> PyResult<ModelKind> {
    match name {
        "true" => Ok(ModelKind::TrueExact),
        "true_lorentzian" => Ok(ModelKind::TrueLorentzian),
        "inout" => Ok(ModelKind::InsideOutside),
        "pseudo" => Ok(ModelKind::PseudoMode),
        other => Err(PyValueError::new_err(format!(
            "unknown model '{other}' (expected true, true_lorentzian, inout, pseudo)"
        ))),
    }
}

fn load_config(name: &str, dt: Option<f64>, grid_count: Option<usize>) -> PyResult<ScenarioConfig> {
    let mut config = preset(name).map_err(py_err)?;
    if let Some(dt) = dt {
        config.integrator.dt = dt;
    }
    if let Some(count) = grid_count {
        config.grid.count = count;
    }
    config.validate().map_err(py_err)?;
    Ok(config)
}

/// Amplitude-model trajectory: populations of the atomic levels, the cavity
/// photon, the outside field, and the accumulated leaked-photon number.
#[pyclass(get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub p_g: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_photon: Vec<f64>,
    pub p_field: Vec<f64>,
    pub n_leaked: Vec<f64>,
}

#[pymethods]
impl Trajectory {
    /// Total probability at the final recorded time (should stay near 1).
    fn final_total(&self) -> f64 {
        let i = self.t.len() - 1;
        self.p_g[i] + self.p_e[i] + self.p_photon[i] + self.p_field[i] + self.n_leaked[i]
    }
}

/// Density-matrix trajectory of the four-level Lindblad model.
#[pyclass(get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct MasterTrajectory {
    pub t: Vec<f64>,
    pub rho11: Vec<f64>,
    pub rho22: Vec<f64>,
    pub rho33: Vec<f64>,
    pub rho44: Vec<f64>,
    pub purity: Vec<f64>,
}

/// Outgoing-photon spectral density sampled on the frequency grid.
#[pyclass(get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
    pub warnings: Vec<String>,
}

/// A designed Rabi envelope together with its predicted emission.
#[pyclass(get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PulseDesign {
    pub t: Vec<f64>,
    pub omega_drive: Vec<f64>,
    pub theta: Vec<f64>,
    pub flux_predicted: Vec<f64>,
    pub max_effective_coupling: f64,
    pub regime_flags: Vec<String>,
}

/// Full-model check of a designed pulse against its Gaussian target.
#[pyclass(get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PulseValidation {
    pub t: Vec<f64>,
    pub flux_realized: Vec<f64>,
    pub n_inf: f64,
    pub l1_raw: f64,
    pub l1_retarded: f64,
    pub response_delay: f64,
}

/// Names of the built-in scenario presets.
#[pyfunction]
fn presets() -> Vec<String> {
    PRESET_NAMES.iter().map(|s| s.to_string()).collect()
}

/// The JSON form of a preset, as accepted by the CLI `--config` flag.
#[pyfunction]
fn preset_json(name: &str) -> PyResult<String> {
    let config = preset(name).map_err(py_err)?;
    Ok(serde_json::to_string_pretty(&config).expect("config serializes"))
}

/// Integrate one amplitude model ("true", "true_lorentzian", "inout",
/// "pseudo") of a preset scenario.
#[pyfunction]
#[pyo3(signature = (model, preset, dt=None, grid_count=None))]
fn simulate(
    model: &str,
    preset: &str,
    dt: Option<f64>,
    grid_count: Option<usize>,
) -> PyResult<Trajectory> {
    let kind = parse_model(model)?;
    let config = load_config(preset, dt, grid_count)?;
    let traj = run(kind, &config, &RunOptions::default()).map_err(py_err)?;
    Ok(Trajectory {
        t: traj.points.iter().map(|p| p.t).collect(),
        p_g: traj.points.iter().map(|p| p.p_g).collect(),
        p_e: traj.points.iter().map(|p| p.p_e).collect(),
        p_photon: traj.points.iter().map(|p| p.p_cavity).collect(),
        p_field: traj.points.iter().map(|p| p.p_field).collect(),
        n_leaked: traj.points.iter().map(|p| p.n_leaked).collect(),
    })
}

/// Integrate the four-level Lindblad master equation for a preset scenario.
#[pyfunction]
#[pyo3(signature = (preset, dt=None))]
fn simulate_master(preset: &str, dt: Option<f64>) -> PyResult<MasterTrajectory> {
    let config = load_config(preset, dt, None)?;
    let params = MasterParams::from_config(&config);
    let initial = match config.initial_state {
        InitialState::Ground => DensityMatrix4::ground(),
        InitialState::Excited => {
            let mut psi = [num_complex::Complex64::new(0.0, 0.0); 4];
            psi[1] = num_complex::Complex64::new(1.0, 0.0);
            DensityMatrix4::from_pure(&psi)
        }
    };
    let traj = integrate_lindblad(
        &initial,
        &params,
        config.t0,
        config.tf,
        config.integrator.dt,
        config.integrator.record_every,
    )
    .map_err(py_err)?;
    Ok(MasterTrajectory {
        t: traj.times.clone(),
        rho11: traj.states.iter().map(|s| s.population(0)).collect(),
        rho22: traj.states.iter().map(|s| s.population(1)).collect(),
        rho33: traj.states.iter().map(|s| s.population(2)).collect(),
        rho44: traj.states.iter().map(|s| s.population(3)).collect(),
        purity: traj.states.iter().map(|s| s.purity()).collect(),
    })
}

/// Outgoing spectrum of a grid-resolved model at the final time.
#[pyfunction]
#[pyo3(signature = (model, preset, dt=None, grid_count=None))]
fn spectrum(
    model: &str,
    preset: &str,
    dt: Option<f64>,
    grid_count: Option<usize>,
) -> PyResult<Spectrum> {
    let kind = parse_model(model)?;
    let config = load_config(preset, dt, grid_count)?;
    let traj = run(kind, &config, &RunOptions::default()).map_err(py_err)?;
    let spec = outgoing_spectrum(&traj).map_err(py_err)?;
    Ok(Spectrum { omega: spec.omega, density: spec.density, warnings: spec.warnings })
}

/// Design a Rabi envelope that emits a Gaussian photon of duration T with
/// efficiency eta, using the Raman parameters of the given preset.
#[pyfunction]
#[pyo3(signature = (preset="fig6a", eta=0.99, duration=1.0))]
fn design_pulse(preset: &str, eta: f64, duration: f64) -> PyResult<PulseDesign> {
    let config = load_config(preset, None, None)?;
    let target = gaussian_target(duration, eta);
    let params = ShapingParams::new(
        config.atom.g,
        config.atom.delta,
        config.cavity.gamma_c,
        eta,
        target,
    )
    .map_err(py_err)?;
    let drive = design_rabi(&params).map_err(py_err)?;
    let report = regime_report(&params, &drive).map_err(py_err)?;
    let max_g = max_effective_coupling(&params, &drive).map_err(py_err)?;
    let times = params.target.t.clone();
    let (theta, _) = theta_zeta(&params, &drive, &times).map_err(py_err)?;
    let predicted = flux_forward(&params, &drive, &times).map_err(py_err)?;
    Ok(PulseDesign {
        omega_drive: times.iter().map(|&t| drive.value(t)).collect(),
        t: times,
        theta,
        flux_predicted: predicted.flux,
        max_effective_coupling: max_g,
        regime_flags: report.flags,
    })
}

/// Run the full pseudo-mode model with the designed drive and score the
/// realized flux against the Gaussian target.
#[pyfunction]
#[pyo3(signature = (preset="fig6a", eta=0.99, duration=1.0))]
fn validate_pulse(preset: &str, eta: f64, duration: f64) -> PyResult<PulseValidation> {
    let mut config = load_config(preset, None, None)?;
    config.shaping =
        Some(cavsim_core::units::ShapingGoal { eta_eff: eta, pulse_duration: duration });
    let (designed, _) = designed_config(&config).map_err(py_err)?;
    let traj = run(ModelKind::PseudoMode, &designed, &RunOptions::default()).map_err(py_err)?;
    let series = flux_from_population(&traj).map_err(py_err)?;
    let score = validate_against_gaussian(
        &series.t,
        &series.flux,
        duration,
        eta,
        config.cavity.gamma_c,
    );
    Ok(PulseValidation {
        t: series.t,
        flux_realized: series.flux,
        n_inf: score.n_inf,
        l1_raw: score.l1_raw,
        l1_retarded: score.l1_retarded,
        response_delay: score.response_delay,
    })
}

/// Scan the exact mirror transmission |T|² and its single-pole Lorentzian
/// model over [lo, hi].
#[pyfunction]
#[pyo3(signature = (preset, lo, hi, count=501))]
fn mirror_scan(
    preset: &str,
    lo: f64,
    hi: f64,
    count: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) || count < 2 {
        return Err(PyValueError::new_err("need 0 < lo < hi and count >= 2"));
    }
    let config = load_config(preset, None, None)?;
    let mut omega = Vec::with_capacity(count);
    let mut exact = Vec::with_capacity(count);
    let mut lorentz = Vec::with_capacity(count);
    for i in 0..count {
        let w = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        omega.push(w);
        exact.push(response_t(w, &config.cavity).map_err(py_err)?.norm_sqr());
        lorentz.push(lorentzian_t2(w, &config.cavity, 5).map_err(py_err)?);
    }
    Ok((omega, exact, lorentz))
}

/// Scan |η(ω)| (exact and Lorentzian) and |κ(ω)| over the scenario grid.
#[pyfunction]
#[pyo3(signature = (preset, count=501))]
fn coupling_scan(
    preset: &str,
    count: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    if count < 2 {
        return Err(PyValueError::new_err("count must be >= 2"));
    }
    let config = load_config(preset, None, None)?;
    let set = couplings::CouplingSet {
        g: config.atom.g,
        cavity: config.cavity,
        x_atom: config.atom.x_atom,
        mode: couplings::CouplingMode::Exact,
    };
    let lo = config.grid.center - config.grid.half_width;
    let hi = config.grid.center + config.grid.half_width;
    let mut omega = Vec::with_capacity(count);
    let mut eta_exact = Vec::with_capacity(count);
    let mut eta_lor = Vec::with_capacity(count);
    let mut kappa = Vec::with_capacity(count);
    for i in 0..count {
        let w = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        omega.push(w);
        eta_exact.push(couplings::eta(w, &set).map_err(py_err)?.norm());
        eta_lor.push(couplings::eta_lorentzian(w, &set).norm());
        kappa.push(couplings::kappa_c(w, &config.cavity).norm());
    }
    Ok((omega, eta_exact, eta_lor, kappa))
}

#[pymodule]
fn cavsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Trajectory>()?;
    m.add_class::<MasterTrajectory>()?;
    m.add_class::<Spectrum>()?;
    m.add_class::<PulseDesign>()?;
    m.add_class::<PulseValidation>()?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_json, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_master, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(design_pulse, m)?)?;
    m.add_function(wrap_pyfunction!(validate_pulse, m)?)?;
    m.add_function(wrap_pyfunction!(mirror_scan, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_scan, m)?)?;
    Ok(())
}
