use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown preset '{0}'; valid presets: fig3a, fig3b, fig4_G60, fig4_G10, fig6a, fig6b")]
    UnknownPreset(String),
    #[error("refractive index must be >= 1, got {0}")]
    RefractiveIndex(f64),
    #[error("frequency grid extends to non-positive frequencies (center {center}, half-width {half_width})")]
    GridRange { center: f64, half_width: f64 },
    #[error("frequency grid needs at least 3 points, got {0}")]
    GridCount(usize),
    #[error("mode frequency search for index {index} did not converge in {iterations} iterations")]
    ModeSearch { index: i64, iterations: usize },
    #[error("one-photon detuning must be nonzero for the Raman coupling")]
    ZeroDetuning,
    #[error("eta_eff must lie strictly in (0, 1), got {0}")]
    EtaRange(f64),
    #[error("cumulative target flux reaches 1 at t = {0}; lower eta_eff")]
    FluxSaturated(f64),
    #[error("state became non-finite at t = {0}")]
    NonFinite(f64),
    #[error("spectral flux is only defined outside the cavity (x > 0), got x = {0}")]
    OutsideField(f64),
    #[error("exact coupling evaluation requires a mirror specification")]
    MissingMirror,
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
