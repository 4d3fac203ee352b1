use raman_memory::MemoryError;
use serde_json::json;
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] MemoryError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// `config`, `numeric` or `io`.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Model(e) if is_numeric(e) => "numeric",
            CliError::Model(_) => "config",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => 2,
            "numeric" => 3,
            _ => 1,
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Model(e) = self {
            body["variant"] = json!(variant(e));
        }
        json!({ "error": body }).to_string()
    }
}

fn is_numeric(e: &MemoryError) -> bool {
    matches!(
        e,
        MemoryError::Quadrature { .. }
            | MemoryError::WeakField { .. }
            | MemoryError::UndefinedEfficiency
            | MemoryError::GridMismatch(_)
    )
}

fn variant(e: &MemoryError) -> &'static str {
    match e {
        MemoryError::InvalidParameter { .. } => "invalid_parameter",
        MemoryError::ZeroDetuning => "zero_detuning",
        MemoryError::Schedule(_) => "schedule",
        MemoryError::OutOfRange { .. } => "out_of_range",
        MemoryError::BoundaryLeakage { .. } => "boundary_leakage",
        MemoryError::Truncation { .. } => "truncation",
        MemoryError::ModeCoverage { .. } => "mode_coverage",
        MemoryError::StepSize { .. } => "step_size",
        MemoryError::UndefinedEfficiency => "undefined_efficiency",
        MemoryError::SameChannel => "same_channel",
        MemoryError::Quadrature { .. } => "quadrature",
        MemoryError::WeakField { .. } => "weak_field",
        MemoryError::GridMismatch(_) => "grid_mismatch",
        MemoryError::Config(_) => "config",
    }
}
