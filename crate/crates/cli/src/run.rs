use std::path::{Path, PathBuf};

use raman_memory::analytics::{
    capacity, channel_isolation_demo, crosstalk_approx, crosstalk_exact, pulse_bandwidth,
    CapacityReport, ChannelIsolation, CrosstalkSpec, ADIABATIC_LIMIT,
};
use raman_memory::dynamics::Trajectory;
use raman_memory::ensemble::{compare_models, integrate_full, oracle_substeps, ModelComparison};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Normalization, Prepared, RunConfig, SweepSpec};
use crate::error::{CliError, CliResult};
use crate::output::{self, float, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalUnits {
    pub gamma: f64,
    pub kappa: f64,
    pub gamma_prime: f64,
    pub delta: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub config_sha256: String,
    pub efficiency: f64,
    pub reflected_fraction: f64,
    pub energy_closure_residual: f64,
    pub input_output_residual: f64,
    /// `Γ`, 1/s.
    pub gamma: f64,
    /// `κ`, 1/s.
    pub kappa: f64,
    /// `γ'`, 1/s.
    pub gamma_prime: f64,
    /// `C = g'²N/(κγ')`; null when `γ' = 0`.
    pub cooperativity: Option<f64>,
    /// Mode spacing time `δ`, s.
    pub delta: f64,
    /// Index excursion of the schedule actually run.
    pub dn_used: f64,
    /// `(T/δ)(λ/L)` for the storage window.
    pub dn_per_pulse: f64,
    /// `|Cγ'δ/2 − 1|`.
    pub impedance_residual: f64,
    pub modes: usize,
    pub samples: usize,
    pub dt: f64,
    pub normalization: Normalization,
    pub internal: InternalUnits,
    pub warnings: Vec<String>,
}

/// One finished run, not yet written anywhere.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub prepared: Prepared,
    pub trajectory: Trajectory,
    pub summary: Summary,
}

pub fn run(config: &RunConfig) -> CliResult<RunOutcome> {
    let prepared = config.prepare()?;
    let trajectory = prepared.setup.integrate(prepared.dt)?;
    let summary = summarize(config, &prepared, &trajectory);
    Ok(RunOutcome {
        config: config.clone(),
        prepared,
        trajectory,
        summary,
    })
}

fn summarize(config: &RunConfig, prepared: &Prepared, traj: &Trajectory) -> Summary {
    let setup = &prepared.setup;
    let d = &setup.derived;
    let norm = prepared.normalization;
    let rate = 1.0 / norm.rate_scale;
    let mut warnings = Vec::new();
    if !setup.params.is_raman_limit() {
        warnings.push("parameters are outside the Raman limit".to_string());
    }
    let ratio = pulse_bandwidth(&setup.pulse) / (d.kappa + d.gamma);
    if ratio > ADIABATIC_LIMIT {
        warnings.push(format!(
            "pulse bandwidth is {ratio:.3} of κ+Γ; the cavity is not adiabatic"
        ));
    }
    let window = setup.scenario.storage_duration();
    Summary {
        version: VERSION.to_string(),
        config_sha256: config.hash(),
        efficiency: traj.efficiency(),
        reflected_fraction: traj.ledger.reflected_fraction(),
        energy_closure_residual: traj.ledger.closure_residual(),
        input_output_residual: traj.input_output_residual(),
        gamma: d.gamma * rate,
        kappa: d.kappa * rate,
        gamma_prime: d.gamma_prime * rate,
        cooperativity: d.cooperativity.is_finite().then_some(d.cooperativity),
        delta: d.delta * norm.time_unit_s,
        dn_used: setup.schedule.excursion(),
        dn_per_pulse: (window / d.delta) * (setup.params.control_wavelength / setup.params.length),
        impedance_residual: d.impedance_residual(),
        modes: setup.modes.len(),
        samples: traj.len(),
        dt: traj.dt * norm.time_unit_s,
        normalization: norm,
        internal: InternalUnits {
            gamma: d.gamma,
            kappa: d.kappa,
            gamma_prime: d.gamma_prime,
            delta: d.delta,
            dt: traj.dt,
        },
        warnings,
    }
}

#[derive(Debug, Clone)]
pub struct Written {
    pub trajectory: PathBuf,
    pub summary: PathBuf,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Runs and writes `<stem>.trajectory.csv` and `<stem>.summary.json`.
pub fn simulate(config: &RunConfig, out: Option<&Path>) -> CliResult<(RunOutcome, Written)> {
    let outcome = run(config)?;
    let dir = output::resolve_dir(out, config.output.dir.as_deref());
    let stem = &config.output.stem;
    let hash = &outcome.summary.config_sha256;
    let csv = output::trajectory_csv(&outcome.trajectory, &outcome.prepared.normalization, hash);
    let trajectory = output::write(&dir, &format!("{stem}.trajectory.csv"), &csv)?;
    let summary = output::write(&dir, &format!("{stem}.summary.json"), &to_json(&outcome.summary))?;
    Ok((outcome, Written { trajectory, summary }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub result: Result<Summary, String>,
}

/// Runs every point, `jobs` at a time; rows come back in point order.
pub fn sweep(spec: &SweepSpec, jobs: usize) -> CliResult<Vec<SweepRow>> {
    spec.check()?;
    let values = spec.values();
    let point = |(index, value): (usize, f64)| SweepRow {
        index,
        value,
        result: spec
            .point(value)
            .and_then(|c| run(&c))
            .map(|o| o.summary)
            .map_err(|e| e.to_string()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(pool.install(|| values.into_par_iter().enumerate().map(point).collect()))
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "index",
    "value",
    "status",
    "efficiency",
    "reflected_fraction",
    "energy_closure_residual",
    "input_output_residual",
    "impedance_residual",
    "error",
];

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = output::header(&spec_hash(spec), &SWEEP_COLUMNS);
    for row in rows {
        let cells = match &row.result {
            Ok(s) => vec![
                row.index.to_string(),
                float(row.value),
                "ok".into(),
                float(s.efficiency),
                float(s.reflected_fraction),
                float(s.energy_closure_residual),
                float(s.input_output_residual),
                float(s.impedance_residual),
                String::new(),
            ],
            Err(msg) => {
                let mut cells = vec![row.index.to_string(), float(row.value), "failed".into()];
                cells.extend(std::iter::repeat(String::new()).take(5));
                cells.push(format!("\"{}\"", msg.replace('"', "\"\"")));
                cells
            }
        };
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn spec_hash(spec: &SweepSpec) -> String {
    use sha2::{Digest, Sha256};
    let canonical = serde_json::to_string(spec).expect("sweep serializes");
    crate::config::hex(&Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub version: String,
    pub config_sha256: String,
    pub atoms: usize,
    pub raman_factor: f64,
    pub efficiency_collective: f64,
    pub efficiency_full: f64,
    pub max_weak_field: f64,
    pub oracle_substeps: usize,
    pub comparison: ModelComparison,
}

/// Runs the discrete-atom oracle beside the collective model.
pub fn validate(config: &RunConfig, out: Option<&Path>) -> CliResult<ValidationReport> {
    let outcome = run(config)?;
    let setup = &outcome.prepared.setup;
    let ensemble = config.ensemble()?;
    let stride = oracle_substeps(&setup.params, outcome.trajectory.dt);
    let full = integrate_full(
        &setup.params,
        &ensemble,
        &setup.schedule,
        &setup.pulse,
        &setup.scenario,
        outcome.trajectory.dt / stride as f64,
        stride,
    )?;
    let comparison = compare_models(&full, &outcome.trajectory)?;
    let p = &setup.params;
    let report = ValidationReport {
        version: VERSION.to_string(),
        config_sha256: outcome.summary.config_sha256.clone(),
        atoms: ensemble.len(),
        raman_factor: p.detuning.abs() / p.rabi_omega.max(p.collective_g()),
        efficiency_collective: outcome.trajectory.efficiency(),
        efficiency_full: full.trajectory.efficiency(),
        max_weak_field: full.max_weak_field,
        oracle_substeps: stride,
        comparison,
    };
    let dir = output::resolve_dir(out, config.output.dir.as_deref());
    let stem = &config.output.stem;
    let norm = outcome.prepared.normalization;
    let hash = &report.config_sha256;
    output::write(
        &dir,
        &format!("{stem}.full.trajectory.csv"),
        &output::trajectory_csv(&full.trajectory, &norm, hash),
    )?;
    output::write(
        &dir,
        &format!("{stem}.residuals.csv"),
        &output::residual_csv(&report.comparison, &setup.modes.t_q, &norm, hash),
    )?;
    output::write(&dir, &format!("{stem}.validation.json"), &to_json(&report))?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalysisRequest {
    Capacity(CapacityRequest),
    Crosstalk(CrosstalkRequest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRequest {
    /// Storage window `T`, s.
    pub window: f64,
    /// Mode spacing time `δ`, s.
    pub delta: f64,
    pub wavelength: f64,
    pub length: f64,
    pub dn_total: f64,
    pub cooperativity: f64,
    /// Adds a leakage/SNR table for `m = 1..=channels`.
    #[serde(default)]
    pub crosstalk: Option<CrosstalkSpec>,
    #[serde(default = "default_channels")]
    pub channels: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkRequest {
    pub spec: CrosstalkSpec,
    /// Also sum exact leakage over `m = 1..=channels`.
    #[serde(default = "default_channels")]
    pub channels: u32,
    /// Lattice size for the isolation demo; skipped when absent.
    #[serde(default)]
    pub demo_atoms: Option<usize>,
}

fn default_channels() -> u32 {
    100
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosstalkReport {
    pub m: u32,
    pub approx: f64,
    pub exact: f64,
    pub relative_difference: f64,
    pub delta_k: f64,
    pub channels: u32,
    pub total_leakage: f64,
    pub total_snr: f64,
    pub warnings: Vec<String>,
    pub demo: Option<ChannelIsolation>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalysisReport {
    Capacity(CapacityReport),
    Crosstalk(CrosstalkReport),
}

pub fn parse_analysis(text: &str) -> CliResult<AnalysisRequest> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn analyze(request: &AnalysisRequest) -> CliResult<AnalysisReport> {
    match request {
        AnalysisRequest::Capacity(r) => {
            let report = capacity(r.window, r.delta, r.wavelength, r.length, r.dn_total, r.cooperativity)?;
            let report = match &r.crosstalk {
                Some(spec) => report.with_channel_table(spec, r.channels)?,
                None => report,
            };
            Ok(AnalysisReport::Capacity(report))
        }
        AnalysisRequest::Crosstalk(r) => {
            let approx = crosstalk_approx(&r.spec)?;
            let exact = crosstalk_exact(&r.spec)?;
            let total = raman_memory::analytics::total_leakage(&r.spec, r.channels)?;
            let demo = r
                .demo_atoms
                .map(|atoms| channel_isolation_demo(&r.spec, atoms))
                .transpose()?;
            Ok(AnalysisReport::Crosstalk(CrosstalkReport {
                m: r.spec.m,
                approx,
                exact,
                relative_difference: (exact - approx).abs() / approx,
                delta_k: r.spec.delta_k(),
                channels: r.channels,
                total_leakage: total,
                total_snr: 1.0 / total,
                warnings: r.spec.warnings(),
                demo,
            }))
        }
    }
}
