//! Collective spin-wave/cavity dynamics through storage and retrieval.
//!
//! The state is one cavity amplitude plus one amplitude per retained
//! spin-wave mode. Mode `q` couples to the cavity through the diffraction
//! weight of its instantaneous mismatch `μ_q(t)`, so backward and forward
//! retrieval both follow from the index schedule alone.

mod collective;
mod rk4;
mod setup;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};
use crate::model::IndexSchedule;

pub use collective::{integrate, run_retrieval, run_storage, step_limit, CollectiveSystem, StorageResult};
pub use rk4::{Rk4, Stage};
pub use setup::{gaussian_scenario, GaussianRun, MemoryDesign, Setup, SetupOptions, GAUSSIAN_GAMMA, GAUSSIAN_GAMMA_PRIME, GAUSSIAN_WINDOW};
pub use trajectory::{
    efficiency, EnergyLedger, FieldRecord, SpinHistory, SpinWaveState, Trajectory,
};

/// How the index is replayed after the flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalMode {
    /// Slope reversed: time-reversed replica.
    Backward,
    /// Storage ramp repeated after a reset: delayed, non-reversed replica.
    Forward,
}

/// Storage window `[start, flip]` followed by retrieval window `[flip, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub start: f64,
    pub flip: f64,
    pub end: f64,
    pub mode: RetrievalMode,
    /// Remove the `e^{±iβt}` factors by modulating the control phase.
    pub phase_compensation: bool,
    /// Record every mode amplitude each `stride` samples.
    #[serde(default)]
    pub spin_record_stride: Option<usize>,
}

impl ScenarioConfig {
    /// Windows `[−T, 0]` and `[0, T]` with phase compensation on.
    pub fn symmetric(duration: f64, mode: RetrievalMode) -> Self {
        ScenarioConfig {
            start: -duration,
            flip: 0.0,
            end: duration,
            mode,
            phase_compensation: true,
            spin_record_stride: None,
        }
    }

    pub fn storage_duration(&self) -> f64 {
        self.flip - self.start
    }

    pub fn retrieval_duration(&self) -> f64 {
        self.end - self.flip
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start < self.flip && self.flip < self.end) {
            return Err(MemoryError::invalid(
                "scenario",
                format!(
                    "windows must be ordered, got [{}, {}, {}]",
                    self.start, self.flip, self.end
                ),
            ));
        }
        if self.spin_record_stride == Some(0) {
            return Err(MemoryError::invalid("spin_record_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Index schedule realizing this scenario: storage ramp of rate `slope`
    /// reaching `n_flip` at the flip.
    pub fn schedule(
        &self,
        n_flip: f64,
        slope: f64,
        control_wavelength: f64,
        reference_k: f64,
    ) -> Result<IndexSchedule> {
        self.validate()?;
        match self.mode {
            RetrievalMode::Backward => IndexSchedule::triangular(
                self.start,
                self.flip,
                self.end,
                n_flip,
                slope,
                control_wavelength,
                reference_k,
            ),
            RetrievalMode::Forward => IndexSchedule::repeated_ramp(
                self.start,
                self.flip,
                self.end,
                n_flip,
                slope,
                control_wavelength,
                reference_k,
            ),
        }
    }

    /// Check that `schedule` spans the windows and replays the storage ramp
    /// the way `mode` requires.
    pub fn check_schedule(&self, schedule: &IndexSchedule) -> Result<()> {
        self.validate()?;
        let tol = 1e-9 * (self.end - self.start);
        if schedule.start() > self.start + tol || schedule.end() < self.end - tol {
            return Err(MemoryError::Schedule(format!(
                "schedule [{}, {}] does not span scenario [{}, {}]",
                schedule.start(),
                schedule.end(),
                self.start,
                self.end
            )));
        }
        if (schedule.anchor() - self.flip).abs() > tol {
            return Err(MemoryError::Schedule("schedule anchor must sit at the flip".into()));
        }
        let store = schedule.storage_slope();
        if !(store > 0.0) {
            return Err(MemoryError::Schedule("storage ramp must increase the index".into()));
        }
        let expected = match self.mode {
            RetrievalMode::Backward => -store,
            RetrievalMode::Forward => store,
        };
        for seg in schedule.segments() {
            let (in_storage, in_retrieval) = (seg.t_end <= self.flip + tol, seg.t_start >= self.flip - tol);
            let want = if in_storage {
                store
            } else if in_retrieval {
                expected
            } else {
                return Err(MemoryError::Schedule("a segment straddles the flip".into()));
            };
            if (seg.slope - want).abs() > 1e-12 * store {
                return Err(MemoryError::Schedule(format!(
                    "segment [{}, {}] has slope {} but {:?} retrieval needs {}",
                    seg.t_start, seg.t_end, seg.slope, self.mode, want
                )));
            }
        }
        Ok(())
    }
}
