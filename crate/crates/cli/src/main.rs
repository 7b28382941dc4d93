//! Command-line runner: scenario simulation, representation comparison,
//! pulse design, response scans, and the numerical-oracle suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cavsim_core::dynamics::{run, ModelKind, RunOptions};
use cavsim_core::master::{integrate_lindblad, DensityMatrix4, MasterParams};
use cavsim_core::mirror::{lorentzian_t2, response_t};
use cavsim_core::observables::{
    flux_from_population, l2_mismatch, outgoing_spectrum, peak_shift, FluxSeries, Spectrum,
};
use cavsim_core::shaping::{
    design_rabi, designed_config, flux_forward, gaussian_flux_value, gaussian_target,
    max_effective_coupling, regime_report, theta_zeta, validate_against_gaussian, ShapingParams,
};
use cavsim_core::units::{preset, InitialState, ScenarioConfig, PRESET_NAMES};
use cavsim_core::verify as oracle;
use cavsim_core::{couplings, Error};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "cavsim", version, about = "Leaky-cavity single-photon emission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model of a scenario and write trajectory/observable CSVs.
    Simulate(SimulateArgs),
    /// Run the three representations side by side and emit mismatch metrics.
    Compare(CompareArgs),
    /// Design a Rabi envelope for a target photon shape.
    Shape(ShapeArgs),
    /// Scan the exact mirror response against its Lorentzian decomposition.
    Mirror(ScanArgs),
    /// Scan the coupling functions over the frequency grid.
    Couplings(ScanArgs),
    /// Run the numerical-oracle suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario preset name.
    #[arg(long, value_parser = PRESET_NAMES)]
    preset: Option<String>,
    /// Path to a scenario config (JSON), alternative to --preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the frequency-grid point count.
    #[arg(long)]
    grid_count: Option<usize>,
    /// Override the integrator step.
    #[arg(long)]
    dt: Option<f64>,
    /// Reserved; the dynamics are deterministic and ignore it.
    #[arg(long)]
    seed: Option<u64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig, CliError> {
        let mut config = match (&self.preset, &self.config) {
            (Some(name), None) => preset(name).map_err(CliError::config)?,
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?
            }
            _ => {
                return Err(CliError::Config(
                    "exactly one of --preset or --config is required".into(),
                ))
            }
        };
        if let Some(count) = self.grid_count {
            config.grid.count = count;
        }
        if let Some(dt) = self.dt {
            config.integrator.dt = dt;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Which representation to integrate.
    #[arg(long)]
    model: CliModel,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliModel {
    /// True-mode equations with the exact coupling.
    True,
    /// Inside-outside (cavity + reservoir) equations.
    Inout,
    /// Pseudo-mode non-Hermitian model.
    Pseudo,
    /// Four-level Lindblad master equation.
    Master,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario preset to compare across representations.
    #[arg(long, value_parser = PRESET_NAMES)]
    scenario: String,
    #[command(flatten)]
    overrides: OverrideArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ShapeArgs {
    /// Target shape family.
    #[arg(long, default_value = "gaussian", value_parser = ["gaussian"])]
    target: String,
    /// Emission efficiency η ∈ (0,1).
    #[arg(long, default_value_t = 0.99)]
    eta: f64,
    /// Target pulse duration T.
    #[arg(long, default_value_t = 1.0)]
    pulse_duration: f64,
    /// Scenario supplying g, Δ, Γ_c and the integration window.
    #[arg(long, default_value = "fig6a", value_parser = PRESET_NAMES)]
    preset: String,
    /// Also integrate the full pseudo-mode model with the designed drive.
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Frequency band "lo:hi"; defaults to the scenario grid window.
    #[arg(long)]
    scan: Option<String>,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional directory for the oracle-result CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

enum CliError {
    Config(String),
    Numerical(String),
    Verification(String),
}

impl CliError {
    fn config(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    fn from_core(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Verification(m) => m,
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_hash: String,
    version: String,
    wall_time_s: f64,
    outputs: Vec<String>,
    warnings: Vec<String>,
}

struct ManifestBuilder {
    command: String,
    config_hash: String,
    started: Instant,
    outputs: Vec<String>,
    warnings: Vec<String>,
}

impl ManifestBuilder {
    fn new(config_hash: String) -> Self {
        ManifestBuilder {
            command: std::env::args().collect::<Vec<_>>().join(" "),
            config_hash,
            started: Instant::now(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn write_file(&mut self, dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn finish(mut self, dir: &Path) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: self.command.clone(),
            config_hash: self.config_hash.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: {
                let mut o = self.outputs.clone();
                o.push("manifest.json".into());
                o
            },
            warnings: self.warnings.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest)
            .expect("manifest serializes")
            + "\n";
        self.write_file(dir, "manifest.json", &text)?;
        for w in &self.warnings {
            eprintln!("warning: {w}");
        }
        Ok(())
    }
}

/// FNV-1a over the canonical JSON form of the config.
fn config_hash(config: &ScenarioConfig) -> String {
    let text = serde_json::to_string(config).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    format!("{hash:016x}")
}

fn worker_cap() -> usize {
    std::env::var("CAVSIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(3)
}

fn csv_line(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(",")
}

fn flux_csv(series: &FluxSeries) -> String {
    let mut out = String::from("t,flux,n\n");
    for i in 0..series.t.len() {
        out.push_str(&csv_line(&[series.t[i], series.flux[i], series.n[i]]));
        out.push('\n');
    }
    out
}

fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("omega,density,grid_native\n");
    for i in 0..spectrum.omega.len() {
        out.push_str(&csv_line(&[
            spectrum.omega[i],
            spectrum.density[i],
            spectrum.grid_native[i],
        ]));
        out.push('\n');
    }
    out
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config = args.scenario.load()?;
    let mut manifest = ManifestBuilder::new(config_hash(&config));
    manifest.warnings = config.validate().map_err(CliError::config)?;
    if config.tf == config.t0 {
        manifest.warnings.push("tf equals t0: trajectory holds only the initial state".into());
    }

    match args.model {
        CliModel::Master => {
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
            .map_err(CliError::from_core)?;
            let mut csv = String::from("t,rho11,rho22,rho33,rho44,purity\n");
            for (i, state) in traj.states.iter().enumerate() {
                csv.push_str(&csv_line(&[
                    traj.times[i],
                    state.population(0),
                    state.population(1),
                    state.population(2),
                    state.population(3),
                    state.purity(),
                ]));
                csv.push('\n');
            }
            manifest.write_file(&args.out, "trajectory.csv", &csv)?;
            let flux: Vec<f64> =
                traj.states.iter().map(|s| params.gamma_c * s.population(2)).collect();
            let series = FluxSeries::from_flux(traj.times.clone(), flux);
            manifest.write_file(&args.out, "flux.csv", &flux_csv(&series))?;
        }
        CliModel::True | CliModel::Inout | CliModel::Pseudo => {
            let model = match args.model {
                CliModel::True => ModelKind::TrueExact,
                CliModel::Inout => ModelKind::InsideOutside,
                _ => ModelKind::PseudoMode,
            };
            let traj =
                run(model, &config, &RunOptions::default()).map_err(CliError::from_core)?;
            let mut csv = String::from("t,p_g,p_e,p_photon,p_field,n_leaked\n");
            for p in &traj.points {
                csv.push_str(&csv_line(&[p.t, p.p_g, p.p_e, p.p_cavity, p.p_field, p.n_leaked]));
                csv.push('\n');
            }
            manifest.write_file(&args.out, "trajectory.csv", &csv)?;
            if model != ModelKind::TrueExact {
                if let Ok(series) = flux_from_population(&traj) {
                    manifest.write_file(&args.out, "flux.csv", &flux_csv(&series))?;
                }
            }
            if traj.grid.is_some() {
                let spectrum = outgoing_spectrum(&traj).map_err(CliError::from_core)?;
                manifest.warnings.extend(spectrum.warnings.iter().cloned());
                manifest.write_file(&args.out, "spectrum.csv", &spectrum_csv(&spectrum))?;
            }
        }
    }
    manifest.finish(&args.out)
}

#[derive(Serialize)]
struct CompareMetrics {
    l2_true_vs_lorentzian: f64,
    l2_true_vs_inout: f64,
    l2_lorentzian_vs_inout: f64,
    peak_shift_true: f64,
    peak_shift_lorentzian: f64,
    peak_shift_inout: f64,
    profile_l1_inout_vs_pseudo: f64,
    steady_state_warnings: Vec<String>,
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let mut config = preset(&args.scenario).map_err(CliError::config)?;
    if let Some(count) = args.overrides.grid_count {
        config.grid.count = count;
    }
    if let Some(dt) = args.overrides.dt {
        config.integrator.dt = dt;
    }
    let mut manifest = ManifestBuilder::new(config_hash(&config));
    manifest.warnings = config.validate().map_err(CliError::config)?;

    let models =
        [ModelKind::TrueExact, ModelKind::TrueLorentzian, ModelKind::InsideOutside];
    let opts = RunOptions::default();
    let cap = worker_cap().max(1);
    let mut results: Vec<Option<cavsim_core::dynamics::Trajectory>> =
        (0..models.len()).map(|_| None).collect();
    if cap == 1 {
        for (i, &m) in models.iter().enumerate() {
            results[i] = Some(run(m, &config, &opts).map_err(CliError::from_core)?);
        }
    } else {
        let outcomes: Vec<Result<cavsim_core::dynamics::Trajectory, Error>> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = models
                    .iter()
                    .map(|&m| {
                        let cfg = &config;
                        scope.spawn(move || run(m, cfg, &RunOptions::default()))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            });
        for (i, outcome) in outcomes.into_iter().enumerate() {
            results[i] = Some(outcome.map_err(CliError::from_core)?);
        }
    }
    let traj_true = results[0].take().unwrap();
    let traj_lor = results[1].take().unwrap();
    let traj_inout = results[2].take().unwrap();
    let pseudo = run(ModelKind::PseudoMode, &config, &opts).map_err(CliError::from_core)?;

    let spec_true = outgoing_spectrum(&traj_true).map_err(CliError::from_core)?;
    let spec_lor = outgoing_spectrum(&traj_lor).map_err(CliError::from_core)?;
    let spec_inout = outgoing_spectrum(&traj_inout).map_err(CliError::from_core)?;

    let mut csv = String::from("omega,density_true,density_lorentzian,density_inout\n");
    for i in 0..spec_true.omega.len() {
        csv.push_str(&csv_line(&[
            spec_true.omega[i],
            spec_true.density[i],
            spec_lor.density[i],
            spec_inout.density[i],
        ]));
        csv.push('\n');
    }
    manifest.write_file(&args.out, "spectra.csv", &csv)?;

    let mut profile = String::from("t,p_f1_inout,p_f1_pseudo\n");
    let mut profile_l1 = 0.0;
    for (a, b) in traj_inout.points.iter().zip(&pseudo.points) {
        profile.push_str(&csv_line(&[a.t, a.p_cavity, b.p_cavity]));
        profile.push('\n');
    }
    for w in traj_inout.points.windows(2).zip(pseudo.points.windows(2)) {
        let (ia, ib) = (w.0[0].p_cavity - w.1[0].p_cavity, w.0[1].p_cavity - w.1[1].p_cavity);
        profile_l1 += 0.5 * (w.0[1].t - w.0[0].t) * (ia.abs() + ib.abs());
    }
    manifest.write_file(&args.out, "profiles.csv", &profile)?;

    let mut steady_warnings = Vec::new();
    for (label, s) in
        [("true", &spec_true), ("lorentzian", &spec_lor), ("inout", &spec_inout)]
    {
        for w in &s.warnings {
            steady_warnings.push(format!("{label}: {w}"));
        }
    }
    let omega_c = config.cavity.omega_c;
    let metrics = CompareMetrics {
        l2_true_vs_lorentzian: l2_mismatch(&spec_true, &spec_lor).map_err(CliError::from_core)?,
        l2_true_vs_inout: l2_mismatch(&spec_true, &spec_inout).map_err(CliError::from_core)?,
        l2_lorentzian_vs_inout: l2_mismatch(&spec_lor, &spec_inout)
            .map_err(CliError::from_core)?,
        peak_shift_true: peak_shift(&spec_true, omega_c),
        peak_shift_lorentzian: peak_shift(&spec_lor, omega_c),
        peak_shift_inout: peak_shift(&spec_inout, omega_c),
        profile_l1_inout_vs_pseudo: profile_l1,
        steady_state_warnings: steady_warnings.clone(),
    };
    manifest.warnings.extend(steady_warnings);
    let text = serde_json::to_string_pretty(&metrics).expect("metrics serialize") + "\n";
    manifest.write_file(&args.out, "metrics.json", &text)?;
    println!(
        "L2 mismatch: true-vs-lorentzian {:.4}, true-vs-inout {:.4}, lorentzian-vs-inout {:.4}",
        metrics.l2_true_vs_lorentzian, metrics.l2_true_vs_inout, metrics.l2_lorentzian_vs_inout
    );
    manifest.finish(&args.out)
}

fn cmd_shape(args: &ShapeArgs) -> Result<(), CliError> {
    let mut config = preset(&args.preset).map_err(CliError::config)?;
    config.shaping = Some(cavsim_core::units::ShapingGoal {
        eta_eff: args.eta,
        pulse_duration: args.pulse_duration,
    });
    let mut manifest = ManifestBuilder::new(config_hash(&config));

    let target = gaussian_target(args.pulse_duration, args.eta);
    let params = ShapingParams::new(
        config.atom.g,
        config.atom.delta,
        config.cavity.gamma_c,
        args.eta,
        target,
    )
    .map_err(CliError::from_core)?;
    let drive = design_rabi(&params).map_err(CliError::from_core)?;
    let report = regime_report(&params, &drive).map_err(CliError::from_core)?;
    for flag in &report.flags {
        manifest.warnings.push(flag.clone());
    }
    let max_g = max_effective_coupling(&params, &drive).map_err(CliError::from_core)?;
    println!(
        "max G = {max_g:.3}, ratios: Δ/maxΩ {:.2}, Δ/|g| {:.2}, Γ_c/maxG {:.2}, Γ_cΔ/g² {:.2}",
        report.delta_over_max_omega,
        report.delta_over_g,
        report.gamma_over_max_g,
        report.gamma_delta_over_g_squared
    );

    let (theta, _zeta) =
        theta_zeta(&params, &drive, &params.target.t).map_err(CliError::from_core)?;
    let predicted =
        flux_forward(&params, &drive, &params.target.t).map_err(CliError::from_core)?;
    let mut csv = String::from("t,omega_drive,theta,flux_predicted\n");
    for (i, &t) in params.target.t.iter().enumerate() {
        csv.push_str(&csv_line(&[t, drive.value(t), theta[i], predicted.flux[i]]));
        csv.push('\n');
    }
    manifest.write_file(&args.out, "drive.csv", &csv)?;

    if args.validate {
        let (designed, _) = designed_config(&config).map_err(CliError::from_core)?;
        let traj = run(ModelKind::PseudoMode, &designed, &RunOptions::default())
            .map_err(CliError::from_core)?;
        let series = flux_from_population(&traj).map_err(CliError::from_core)?;
        let mut csv = String::from("t,flux_realized,flux_target,n\n");
        for i in 0..series.t.len() {
            csv.push_str(&csv_line(&[
                series.t[i],
                series.flux[i],
                gaussian_flux_value(args.pulse_duration, args.eta, series.t[i]),
                series.n[i],
            ]));
            csv.push('\n');
        }
        manifest.write_file(&args.out, "realized.csv", &csv)?;
        let score = validate_against_gaussian(
            &series.t,
            &series.flux,
            args.pulse_duration,
            args.eta,
            config.cavity.gamma_c,
        );
        println!(
            "validation: n(inf) = {:.4}, L1 raw = {:.4}, L1 retarded({:.4}) = {:.4}",
            score.n_inf, score.l1_raw, score.response_delay, score.l1_retarded
        );
    }
    manifest.finish(&args.out)
}

fn parse_band(spec: Option<&str>, config: &ScenarioConfig) -> Result<(f64, f64), CliError> {
    match spec {
        None => Ok((
            config.grid.center - config.grid.half_width,
            config.grid.center + config.grid.half_width,
        )),
        Some(text) => {
            let (lo, hi) = text
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("band '{text}' is not lo:hi")))?;
            let lo: f64 = lo
                .parse()
                .map_err(|e| CliError::Config(format!("band start '{lo}': {e}")))?;
            let hi: f64 = hi
                .parse()
                .map_err(|e| CliError::Config(format!("band end '{hi}': {e}")))?;
            if !(lo.is_finite() && hi.is_finite() && lo < hi && lo > 0.0) {
                return Err(CliError::Config(format!("band {lo}:{hi} must satisfy 0 < lo < hi")));
            }
            Ok((lo, hi))
        }
    }
}

fn cmd_mirror(args: &ScanArgs) -> Result<(), CliError> {
    let config = args.scenario.load()?;
    let (lo, hi) = parse_band(args.scan.as_deref(), &config)?;
    let mut manifest = ManifestBuilder::new(config_hash(&config));
    let count = args.scenario.grid_count.unwrap_or(config.grid.count).max(2);
    let mut csv = String::from("omega,re_T,im_T,abs_T2,lorentzian_T2\n");
    for i in 0..count {
        let omega = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let t = response_t(omega, &config.cavity).map_err(CliError::from_core)?;
        let lor = lorentzian_t2(omega, &config.cavity, 5).map_err(CliError::from_core)?;
        csv.push_str(&csv_line(&[omega, t.re, t.im, t.norm_sqr(), lor]));
        csv.push('\n');
    }
    manifest.write_file(&args.out, "mirror_scan.csv", &csv)?;
    manifest.finish(&args.out)
}

fn cmd_couplings(args: &ScanArgs) -> Result<(), CliError> {
    let config = args.scenario.load()?;
    let (lo, hi) = parse_band(args.scan.as_deref(), &config)?;
    let mut manifest = ManifestBuilder::new(config_hash(&config));
    let count = args.scenario.grid_count.unwrap_or(config.grid.count).max(2);
    let exact = couplings::CouplingSet {
        g: config.atom.g,
        cavity: config.cavity,
        x_atom: config.atom.x_atom,
        mode: couplings::CouplingMode::Exact,
    };
    let mut csv = String::from("omega,abs_eta_exact,abs_eta_lorentzian,abs_kappa\n");
    for i in 0..count {
        let omega = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let eta_e = couplings::eta(omega, &exact).map_err(CliError::from_core)?;
        let eta_l = couplings::eta_lorentzian(omega, &exact);
        let kappa = couplings::kappa_c(omega, &config.cavity);
        csv.push_str(&csv_line(&[omega, eta_e.norm(), eta_l.norm(), kappa.norm()]));
        csv.push('\n');
    }
    manifest.write_file(&args.out, "couplings_scan.csv", &csv)?;
    manifest.finish(&args.out)
}

struct OracleCheck {
    name: &'static str,
    measured: f64,
    bound: f64,
}

impl OracleCheck {
    fn passed(&self) -> bool {
        self.measured.is_finite() && self.measured <= self.bound
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let (cavity, grid) = oracle::kernel_test_setup().map_err(CliError::from_core)?;
    let width = oracle::kernel_support(&cavity);
    let peak = oracle::kernel_peak(&cavity);

    let apex = oracle::kernel_quadrature(0.0, 0.0, &cavity, &grid);
    let mut checks = vec![OracleCheck {
        name: "kernel apex vs sinc² integral",
        measured: (apex.re - peak).abs() / peak,
        bound: 1e-3,
    }];

    let mut worst_rel: f64 = 0.0;
    let mut state = 0.31f64;
    for _ in 0..100 {
        state = 3.9 * state * (1.0 - state);
        let s = (2.0 * state - 1.0) * 0.85 * width;
        let closed = oracle::kernel_closed_form(s, 0.0, &cavity);
        let quad = oracle::kernel_quadrature(s, 0.0, &cavity, &grid);
        worst_rel = worst_rel.max((quad - closed.value).norm() / closed.value.norm());
    }
    checks.push(OracleCheck {
        name: "kernel closed form vs quadrature (100 pts)",
        measured: worst_rel,
        bound: 1e-3,
    });

    let outside = oracle::kernel_quadrature(1.7 * width, 0.0, &cavity, &grid).norm() / peak;
    checks.push(OracleCheck { name: "kernel outside support", measured: outside, bound: 1e-3 });

    let coarse = oracle::kernel_time_integral_coarse(&cavity);
    checks.push(OracleCheck {
        name: "coarse-grained kernel weight vs Γ_c",
        measured: (coarse - cavity.gamma_c).abs() / cavity.gamma_c,
        bound: 1e-3,
    });

    let eps = oracle::default_eps_sequence();
    let half = oracle::delta_model_limit(0.5, &eps, &|t: f64| t.cos());
    checks.push(OracleCheck {
        name: "half-line delta, a=1/2 → 0.5",
        measured: (half.limit - 0.5).abs(),
        bound: 1e-6,
    });
    let skew = oracle::delta_model_limit(0.25, &eps, &|_| 1.0);
    checks.push(OracleCheck {
        name: "half-line delta, a=1/4 → 0.75",
        measured: (skew.limit - 0.75).abs(),
        bound: 1e-6,
    });
    let slope_demo = oracle::delta_model_limit(0.3, &eps, &|t: f64| t.exp());
    checks.push(OracleCheck {
        name: "delta convergence slope vs 1.0",
        measured: (slope_demo.slope.unwrap_or(f64::NAN) - 1.0).abs(),
        bound: 0.1,
    });
    let full = oracle::delta_full_line(0.7, 1e-5, &|t: f64| (t + 0.2).cos());
    checks.push(OracleCheck {
        name: "full-line delta recovers c(0)",
        measured: (full - 0.2f64.cos()).abs(),
        bound: 1e-6,
    });

    let mut all_ok = true;
    let mut csv = String::from("check,measured,bound,status\n");
    for check in &checks {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        all_ok &= check.passed();
        println!("[{status}] {:<45} measured {:.3e} (bound {:.1e})", check.name, check.measured, check.bound);
        csv.push_str(&format!(
            "{},{:.6e},{:.1e},{status}\n",
            check.name, check.measured, check.bound
        ));
    }
    if let Some(dir) = &args.out {
        let mut manifest = ManifestBuilder::new(String::from("0000000000000000"));
        manifest.write_file(dir, "verify.csv", &csv)?;
        manifest.finish(dir)?;
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Verification("one or more oracle checks failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Shape(args) => cmd_shape(args),
        Command::Mirror(args) => cmd_mirror(args),
        Command::Couplings(args) => cmd_couplings(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
