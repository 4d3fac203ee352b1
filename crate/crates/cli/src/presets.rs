//! Ready-made documents for the standard scenarios, in SI units with a
//! 1 µs pulse unless stated otherwise.

use std::collections::BTreeMap;

use raman_memory::analytics::CrosstalkSpec;
use raman_memory::dynamics::{MemoryDesign, RetrievalMode};
use serde_json::Value;

use crate::config::{RunConfig, SweepRange, SweepSpec, SweepValues};
use crate::error::{CliError, CliResult};
use crate::run::{AnalysisRequest, CapacityRequest, CrosstalkRequest};

pub const PRESETS: [&str; 7] = [
    "gaussian",
    "forward",
    "oracle",
    "kappa-sweep",
    "delta-sweep",
    "capacity",
    "crosstalk",
];

/// Matched backward run with mode spacing `delta` pulse widths.
pub fn gaussian(delta: f64, tau: f64) -> CliResult<RunConfig> {
    let mut c = RunConfig::from_design(&MemoryDesign::matched(delta), tau)?;
    c.output.stem = "gaussian".into();
    Ok(c)
}

/// Forward retrieval with `γ'T = 0.5`.
pub fn forward(tau: f64) -> CliResult<RunConfig> {
    let mut d = MemoryDesign::matched(0.5);
    d.mode = RetrievalMode::Forward;
    d.targets.gamma_prime = 0.5 / d.window;
    let mut c = RunConfig::from_design(&d, tau)?;
    c.output.stem = "forward".into();
    Ok(c)
}

/// Raman-regime design (`|Δ| = 50 max(Ω, g√N)`) light enough for the
/// discrete-atom oracle.
pub fn oracle(tau: f64) -> CliResult<RunConfig> {
    let mut d = MemoryDesign::matched(0.5);
    d.targets.gamma = 5.0;
    d.targets.kappa = 5.0;
    d.targets.raman_factor = 50.0;
    d.window = 4.0;
    let mut c = RunConfig::from_design(&d, tau)?;
    c.output.stem = "oracle".into();
    Ok(c)
}

/// `κ` over `[Γ/4, 4Γ]`, 17 log-spaced points, `δ = τ_p/4`, `γ' = 0`.
pub fn kappa_sweep(tau: f64) -> CliResult<SweepSpec> {
    let mut d = MemoryDesign::matched(0.25);
    d.targets.gamma_prime = 0.0;
    let mut base = RunConfig::from_design(&d, tau)?;
    base.output.stem = "kappa".into();
    let gamma = base.params.kappa;
    Ok(SweepSpec {
        base,
        parameter: "params.kappa".into(),
        values: SweepValues::Range(SweepRange {
            start: gamma / 4.0,
            stop: 4.0 * gamma,
            points: 17,
            log: true,
        }),
        overrides: BTreeMap::new(),
    })
}

/// Ramp rates giving `δ ∈ {2, 1, 1/2} τ_p` on the `δ = τ_p/2` design.
pub fn delta_sweep(tau: f64) -> CliResult<SweepSpec> {
    let base = gaussian(0.5, tau)?;
    let slope_at = |delta_over_tau: f64| {
        base.params.control_wavelength / (delta_over_tau * tau * base.params.length)
    };
    Ok(SweepSpec {
        values: SweepValues::List(vec![slope_at(2.0), slope_at(1.0), slope_at(0.5)]),
        parameter: "schedule.slope".into(),
        overrides: BTreeMap::from([("output.stem".to_string(), Value::from("delta"))]),
        base,
    })
}

pub fn capacity() -> AnalysisRequest {
    AnalysisRequest::Capacity(CapacityRequest {
        window: 1e-6,
        delta: 1e-6,
        wavelength: 1.5e-6,
        length: 0.15,
        dn_total: 1e-3,
        cooperativity: 100.0,
        crosstalk: Some(CrosstalkSpec::reference(1)),
        channels: 100,
    })
}

pub fn crosstalk() -> AnalysisRequest {
    AnalysisRequest::Crosstalk(CrosstalkRequest {
        spec: CrosstalkSpec::reference(1),
        channels: 100,
        demo_atoms: Some(4096),
    })
}

/// JSON document for the named preset.
pub fn preset(name: &str, delta: f64, tau: f64) -> CliResult<String> {
    let json = match name {
        "gaussian" => gaussian(delta, tau)?.to_json(),
        "forward" => forward(tau)?.to_json(),
        "oracle" => oracle(tau)?.to_json(),
        "kappa-sweep" => crate::run::to_json(&kappa_sweep(tau)?),
        "delta-sweep" => crate::run::to_json(&delta_sweep(tau)?),
        "capacity" => crate::run::to_json(&capacity()),
        "crosstalk" => crate::run::to_json(&crosstalk()),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(json)
}
