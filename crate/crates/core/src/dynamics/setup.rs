use std::f64::consts::PI;

use super::{integrate, step_limit, RetrievalMode, ScenarioConfig, Trajectory};
use crate::error::Result;
use crate::model::{
    build_mode_grid, derive_params, make_gaussian_pulse, DerivedParams, DesignTargets,
    IndexSchedule, MemoryParams, ModeGrid, Pulse, TimeGrid, DEFAULT_MAX_MODES,
};

/// Collective rate used for the Gaussian storage/retrieval runs, `Γ τ_p`.
pub const GAUSSIAN_GAMMA: f64 = 20.0;
/// `γ' τ_p` for those runs.
pub const GAUSSIAN_GAMMA_PRIME: f64 = 1e-4;
/// Storage and retrieval window length `T / τ_p`.
pub const GAUSSIAN_WINDOW: f64 = 6.0;

/// Knobs that are not physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupOptions {
    /// Extra mode coverage beyond the scenario window; `None` means five
    /// pulse widths.
    pub guard: Option<f64>,
    pub max_modes: usize,
    /// Control index at the flip.
    pub n_flip: f64,
    /// Quantum-field wave number; `None` phase-matches `q = 0` at the flip.
    pub reference_k: Option<f64>,
}

impl Default for SetupOptions {
    fn default() -> Self {
        SetupOptions {
            guard: None,
            max_modes: DEFAULT_MAX_MODES,
            n_flip: 2.0,
            reference_k: None,
        }
    }
}

/// Everything `integrate` needs, built consistently.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub params: MemoryParams,
    pub slope: f64,
    pub derived: DerivedParams,
    pub schedule: IndexSchedule,
    pub modes: ModeGrid,
    pub pulse: Pulse,
    pub scenario: ScenarioConfig,
}

impl Setup {
    pub fn assemble(
        params: MemoryParams,
        slope: f64,
        scenario: ScenarioConfig,
        pulse: Pulse,
        options: SetupOptions,
    ) -> Result<Self> {
        let derived = derive_params(&params, slope)?;
        let reference_k = options
            .reference_k
            .unwrap_or(2.0 * PI * options.n_flip / params.control_wavelength);
        let schedule =
            scenario.schedule(options.n_flip, slope, params.control_wavelength, reference_k)?;
        let guard = options.guard.unwrap_or(5.0 * pulse.fwhm);
        let modes = build_mode_grid(
            &schedule,
            &derived,
            (scenario.start, scenario.end),
            guard,
            options.max_modes,
        )?;
        Ok(Setup {
            params,
            slope,
            derived,
            schedule,
            modes,
            pulse,
            scenario,
        })
    }

    pub fn step_limit(&self) -> f64 {
        step_limit(&self.derived, self.pulse.fwhm)
    }

    /// `min(τ_p/2000, step limit)`.
    pub fn default_dt(&self) -> f64 {
        (self.pulse.fwhm / 2000.0).min(self.step_limit())
    }

    pub fn integrate(&self, dt: f64) -> Result<Trajectory> {
        integrate(
            &self.params,
            &self.derived,
            &self.schedule,
            &self.modes,
            &self.pulse,
            &self.scenario,
            dt,
        )
    }
}

/// Dimensionless description of a Gaussian-pulse scenario: time in units of
/// the pulse FWHM unless `pulse_fwhm` says otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryDesign {
    pub targets: DesignTargets,
    pub pulse_fwhm: f64,
    /// Window length `T`.
    pub window: f64,
    /// Pulse center; `None` puts it at `−T/2`.
    pub pulse_center: Option<f64>,
    pub mode: RetrievalMode,
    pub phase_compensation: bool,
    pub options: SetupOptions,
}

impl MemoryDesign {
    /// Matched Gaussian design with `τ_p = 1`, `Γ = κ = GAUSSIAN_GAMMA`.
    pub fn matched(delta: f64) -> Self {
        MemoryDesign {
            targets: DesignTargets::matched(delta, GAUSSIAN_GAMMA, GAUSSIAN_GAMMA_PRIME),
            pulse_fwhm: 1.0,
            window: GAUSSIAN_WINDOW,
            pulse_center: None,
            mode: RetrievalMode::Backward,
            phase_compensation: true,
            options: SetupOptions::default(),
        }
    }

    pub fn build(&self) -> Result<Setup> {
        let (params, slope) = self.targets.build()?;
        let center = self.pulse_center.unwrap_or(-0.5 * self.window);
        let half = 6.0 * self.pulse_fwhm;
        let grid = TimeGrid::spanning(center - half, center + half, self.pulse_fwhm / 100.0)?;
        let pulse = make_gaussian_pulse(self.pulse_fwhm, center, grid)?;
        let scenario = ScenarioConfig {
            phase_compensation: self.phase_compensation,
            ..ScenarioConfig::symmetric(self.window, self.mode)
        };
        Setup::assemble(params, slope, scenario, pulse, self.options)
    }
}

/// One Gaussian storage/retrieval run plus the figures of merit read off it.
#[derive(Debug, Clone)]
pub struct GaussianRun {
    pub delta_over_taup: f64,
    pub setup: Setup,
    pub trajectory: Trajectory,
    pub efficiency: f64,
    pub input_fwhm: f64,
    pub output_fwhm: Option<f64>,
    pub output_peak_time: f64,
}

/// Matched backward-retrieval run of a unit-FWHM Gaussian for the given
/// `δ/τ_p`, integrated at `dt = τ_p/2000`.
pub fn gaussian_scenario(delta_over_taup: f64) -> Result<GaussianRun> {
    let setup = MemoryDesign::matched(delta_over_taup).build()?;
    let trajectory = setup.integrate(setup.default_dt())?;
    let retrieved = trajectory.retrieved_record();
    Ok(GaussianRun {
        delta_over_taup,
        efficiency: trajectory.efficiency(),
        input_fwhm: setup.pulse.fwhm,
        output_fwhm: retrieved.fwhm(),
        output_peak_time: retrieved.peak_time(),
        setup,
        trajectory,
    })
}
