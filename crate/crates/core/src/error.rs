use thiserror::Error;

pub type Result<T> = std::result::Result<T, MemoryError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MemoryError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("one-photon detuning is zero; the Raman limit is degenerate")]
    ZeroDetuning,

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("time {t} outside schedule span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("pulse grid too short: needs [{need_start}, {need_end}], has [{have_start}, {have_end}]")]
    BoundaryLeakage {
        need_start: f64,
        need_end: f64,
        have_start: f64,
        have_end: f64,
    },

    #[error("mode grid needs {required} modes but the cap is {cap}")]
    Truncation { required: usize, cap: usize },

    #[error("mode grid spans [{grid_start}, {grid_end}] but the scenario needs [{need_start}, {need_end}]")]
    ModeCoverage {
        grid_start: f64,
        grid_end: f64,
        need_start: f64,
        need_end: f64,
    },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    #[error("input energy is zero; efficiency is undefined")]
    UndefinedEfficiency,

    #[error("channel offset m = 0 addresses the same channel")]
    SameChannel,

    #[error("adaptive quadrature did not converge (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("weak-field regime violated: max |P|^2 + |S|^2 = {value} exceeds {threshold}")]
    WeakField { value: f64, threshold: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl MemoryError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        MemoryError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
