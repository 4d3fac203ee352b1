//! JSON run and sweep documents in SI units, and their conversion to the
//! pulse-width units the simulators work in.

use std::collections::BTreeMap;
use std::path::PathBuf;

use raman_memory::dynamics::{MemoryDesign, RetrievalMode, ScenarioConfig, Setup, SetupOptions};
use raman_memory::ensemble::{AtomEnsemble, Placement, DEFAULT_ORACLE_ATOMS};
use raman_memory::model::{make_gaussian_pulse, MemoryParams, TimeGrid, DEFAULT_MAX_MODES};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Rates in rad/s, lengths in metres.
    pub params: MemoryParams,
    pub schedule: ScheduleSpec,
    pub pulse: PulseSpec,
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub numeric: NumericSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    /// Seeds random atom placement in the oracle.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    /// Storage ramp `dn_c/dt`, 1/s.
    pub slope: f64,
    #[serde(default = "default_n_flip")]
    pub n_flip: f64,
    pub mode: RetrievalMode,
}

fn default_n_flip() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Intensity FWHM, s. Also the internal time unit.
    pub fwhm: f64,
    /// Defaults to the middle of the storage window.
    #[serde(default)]
    pub center: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Length `T` of each window, s.
    pub window: f64,
    #[serde(default)]
    pub flip: f64,
    #[serde(default = "yes")]
    pub phase_compensation: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    /// Step, s. Defaults to the smaller of `τ_p/2000` and the stability bound.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Mode coverage beyond the windows, s. Defaults to `5 τ_p`.
    #[serde(default)]
    pub guard: Option<f64>,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

fn default_max_modes() -> usize {
    DEFAULT_MAX_MODES
}

impl Default for NumericSpec {
    fn default() -> Self {
        NumericSpec {
            dt: None,
            guard: None,
            max_modes: DEFAULT_MAX_MODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_stem")]
    pub stem: String,
}

fn default_stem() -> String {
    "run".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            stem: default_stem(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementKind {
    Uniform,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_atoms")]
    pub atoms: usize,
    #[serde(default = "default_placement")]
    pub placement: PlacementKind,
}

fn default_atoms() -> usize {
    DEFAULT_ORACLE_ATOMS
}

fn default_placement() -> PlacementKind {
    PlacementKind::Uniform
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            atoms: DEFAULT_ORACLE_ATOMS,
            placement: PlacementKind::Uniform,
        }
    }
}

/// Factors used to go from SI to internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Seconds per internal time unit (the pulse FWHM).
    pub time_unit_s: f64,
    /// Internal rate = SI rate × `time_unit_s`.
    pub rate_scale: f64,
    /// Internal field amplitude = SI amplitude × `√time_unit_s`.
    pub field_scale: f64,
}

/// A run converted to internal units, ready to integrate.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub setup: Setup,
    pub dt: f64,
    pub normalization: Normalization,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact canonical serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(canonical.as_bytes()))
    }

    /// Applies `path=value` assignments; see [`set_path`].
    pub fn with_overrides<'a, I>(&self, assignments: I) -> CliResult<Self>
    where
        I: IntoIterator<Item = (&'a str, Value)>,
    {
        let mut doc = serde_json::to_value(self).expect("config serializes");
        for (path, value) in assignments {
            set_path(&mut doc, path, value)?;
        }
        serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn normalization(&self) -> Normalization {
        let tau = self.pulse.fwhm;
        Normalization {
            time_unit_s: tau,
            rate_scale: tau,
            field_scale: tau.sqrt(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let checks = [
            ("pulse.fwhm", self.pulse.fwhm),
            ("scenario.window", self.scenario.window),
            ("schedule.slope", self.schedule.slope),
        ];
        for (name, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(dt) = self.numeric.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Config(format!("numeric.dt must be positive, got {dt}")));
            }
        }
        if self.numeric.guard.is_some_and(|g| !(g >= 0.0)) {
            return Err(CliError::Config("numeric.guard must be non-negative".into()));
        }
        if self.oracle.atoms == 0 {
            return Err(CliError::Config("oracle.atoms must be at least 1".into()));
        }
        self.params.validate()?;
        Ok(())
    }

    /// Converts to pulse-width units and assembles the run.
    pub fn prepare(&self) -> CliResult<Prepared> {
        self.validate()?;
        let norm = self.normalization();
        let tau = norm.time_unit_s;
        let p = &self.params;
        let params = MemoryParams {
            coupling_g: p.coupling_g * tau,
            rabi_omega: p.rabi_omega * tau,
            detuning: p.detuning * tau,
            gamma_p: p.gamma_p * tau,
            gamma_s: p.gamma_s * tau,
            kappa: p.kappa * tau,
            ..*p
        };
        let slope = self.schedule.slope * tau;
        let window = self.scenario.window / tau;
        let flip = self.scenario.flip / tau;
        let center = self.pulse.center.map_or(flip - 0.5 * window, |c| c / tau);
        let grid = TimeGrid::spanning(center - 6.0, center + 6.0, 0.01)?;
        let pulse = make_gaussian_pulse(1.0, center, grid)?;
        let scenario = ScenarioConfig {
            start: flip - window,
            flip,
            end: flip + window,
            mode: self.schedule.mode,
            phase_compensation: self.scenario.phase_compensation,
            spin_record_stride: None,
        };
        let options = SetupOptions {
            guard: self.numeric.guard.map(|g| g / tau),
            max_modes: self.numeric.max_modes,
            n_flip: self.schedule.n_flip,
            reference_k: None,
        };
        let setup = Setup::assemble(params, slope, scenario, pulse, options)?;
        let dt = self.numeric.dt.map_or_else(|| setup.default_dt(), |d| d / tau);
        Ok(Prepared {
            setup,
            dt,
            normalization: norm,
        })
    }

    pub fn ensemble(&self) -> CliResult<AtomEnsemble> {
        let placement = match self.oracle.placement {
            PlacementKind::Uniform => Placement::Uniform,
            PlacementKind::Random => Placement::Random { seed: self.seed },
        };
        Ok(AtomEnsemble::new(placement, self.oracle.atoms, self.params.length)?)
    }

    /// SI configuration reproducing `design` with pulse width `tau` seconds.
    pub fn from_design(design: &MemoryDesign, tau: f64) -> CliResult<Self> {
        let (p, slope) = design.targets.build()?;
        let unit = tau / design.pulse_fwhm;
        let params = MemoryParams {
            coupling_g: p.coupling_g / unit,
            rabi_omega: p.rabi_omega / unit,
            detuning: p.detuning / unit,
            gamma_p: p.gamma_p / unit,
            gamma_s: p.gamma_s / unit,
            kappa: p.kappa / unit,
            ..p
        };
        Ok(RunConfig {
            params,
            schedule: ScheduleSpec {
                slope: slope / unit,
                n_flip: design.options.n_flip,
                mode: design.mode,
            },
            pulse: PulseSpec {
                shape: PulseShape::Gaussian,
                fwhm: tau,
                center: design.pulse_center.map(|c| c * unit),
            },
            scenario: ScenarioSpec {
                window: design.window * unit,
                flip: 0.0,
                phase_compensation: design.phase_compensation,
            },
            numeric: NumericSpec::default(),
            output: OutputSpec::default(),
            oracle: OracleSpec::default(),
            seed: 0,
        })
    }
}

/// Replaces the value at a dotted `path`. Every segment must already exist
/// in the document; an unknown segment is a config error.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> CliResult<()> {
    let mut node = doc;
    for key in path.split('.') {
        node = node
            .as_object_mut()
            .and_then(|map| map.get_mut(key))
            .ok_or_else(|| CliError::Config(format!("unknown config path `{path}`")))?;
    }
    *node = value;
    Ok(())
}

/// `path=value`, with `value` read as JSON and otherwise taken as a string.
pub fn parse_assignment(text: &str) -> CliResult<(String, Value)> {
    let (path, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected path=value, got `{text}`")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((path.trim().to_string(), value))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValues {
    List(Vec<f64>),
    Range(SweepRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: RunConfig,
    /// Dotted path of the swept field, e.g. `params.kappa`.
    pub parameter: String,
    pub values: SweepValues,
    /// Applied to every point before the swept value.
    #[serde(default)]
    pub overrides: BTreeMap<String, Value>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: SweepSpec =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn values(&self) -> Vec<f64> {
        match &self.values {
            SweepValues::List(v) => v.clone(),
            SweepValues::Range(r) => match r.points {
                0 => Vec::new(),
                1 => vec![r.start],
                n => (0..n)
                    .map(|i| {
                        let f = i as f64 / (n - 1) as f64;
                        if r.log {
                            r.start * (r.stop / r.start).powf(f)
                        } else {
                            r.start + (r.stop - r.start) * f
                        }
                    })
                    .collect(),
            },
        }
    }

    pub fn check(&self) -> CliResult<()> {
        let values = self.values();
        if values.is_empty() {
            return Err(CliError::Config("sweep needs at least one point".into()));
        }
        if let SweepValues::Range(r) = &self.values {
            if r.log && !(r.start > 0.0 && r.stop > 0.0) {
                return Err(CliError::Config("log range needs positive endpoints".into()));
            }
        }
        self.point(values[0]).map(|_| ())
    }

    /// Configuration of one sweep point.
    pub fn point(&self, value: f64) -> CliResult<RunConfig> {
        let assignments = self
            .overrides
            .iter()
            .map(|(k, v)| (k.as_str(), v.clone()))
            .chain(std::iter::once((self.parameter.as_str(), Value::from(value))));
        self.base.with_overrides(assignments)
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
