use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};
use crate::model::ModeGrid;
use crate::numeric;

/// Uniformly sampled complex field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<C64>,
}

impl FieldRecord {
    pub fn new(t0: f64, dt: f64, samples: Vec<C64>) -> Self {
        FieldRecord { t0, dt, samples }
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| self.time(i)).collect()
    }

    pub fn energy(&self) -> f64 {
        numeric::energy(&self.samples, self.dt)
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn fwhm(&self) -> Option<f64> {
        numeric::intensity_fwhm(&self.times(), &self.intensity())
    }

    pub fn peak_time(&self) -> f64 {
        let (i, _) = self
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .expect("empty record");
        self.time(i)
    }

    /// Sampled values of `f` on the same grid.
    pub fn sample_like<F: Fn(f64) -> C64>(&self, f: F) -> Vec<C64> {
        (0..self.samples.len()).map(|i| f(self.time(i))).collect()
    }
}

/// Retrieved-to-input energy ratio `∫|E_out|² / ∫|E_in|²`.
pub fn efficiency(input: &FieldRecord, output: &FieldRecord) -> Result<f64> {
    if (input.dt - output.dt).abs() > 1e-9 * input.dt {
        return Err(MemoryError::GridMismatch(format!(
            "input step {} vs output step {}",
            input.dt, output.dt
        )));
    }
    let e_in = input.energy();
    if !(e_in > 0.0) {
        return Err(MemoryError::UndefinedEfficiency);
    }
    Ok(output.energy() / e_in)
}

/// Spin-wave amplitudes at one instant, plus the cavity amplitude so that a
/// stored state can be resumed exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinWaveState {
    pub time: f64,
    pub modes: ModeGrid,
    pub amplitudes: Vec<C64>,
    pub cavity: C64,
}

impl SpinWaveState {
    pub fn empty(time: f64, modes: ModeGrid) -> Self {
        let n = modes.len();
        SpinWaveState {
            time,
            modes,
            amplitudes: vec![C64::new(0.0, 0.0); n],
            cavity: C64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm()).collect()
    }
}

/// Energy bookkeeping over a full run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub input: f64,
    /// Output energy during the storage window.
    pub reflected: f64,
    /// Output energy during the retrieval window.
    pub retrieved: f64,
    pub stored_final: f64,
    pub cavity_final: f64,
    /// `∫ 2γ' Σ|S_q|² dt`.
    pub decayed: f64,
}

impl EnergyLedger {
    pub fn efficiency(&self) -> f64 {
        self.retrieved / self.input
    }

    pub fn reflected_fraction(&self) -> f64 {
        self.reflected / self.input
    }

    /// `|1 − (out + stored + cavity + decayed)/in|`.
    pub fn closure_residual(&self) -> f64 {
        let accounted =
            self.reflected + self.retrieved + self.stored_final + self.cavity_final + self.decayed;
        (1.0 - accounted / self.input).abs()
    }
}

/// Spin amplitudes recorded every `stride` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinHistory {
    pub stride: usize,
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vec<C64>>,
}

/// Time series of one storage-and-retrieval run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub dt: f64,
    /// Index of the storage/retrieval boundary sample.
    pub flip_index: usize,
    pub kappa: f64,
    pub input: Vec<C64>,
    pub cavity: Vec<C64>,
    pub output: Vec<C64>,
    pub spin_norm: Vec<f64>,
    pub spin_at_flip: SpinWaveState,
    pub spin_final: SpinWaveState,
    pub spin_history: Option<SpinHistory>,
    pub ledger: EnergyLedger,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record(&self, field: &[C64], lo: usize, hi: usize) -> FieldRecord {
        FieldRecord::new(self.times[lo], self.dt, field[lo..=hi].to_vec())
    }

    /// Injected field over the storage window.
    pub fn input_record(&self) -> FieldRecord {
        self.record(&self.input, 0, self.flip_index)
    }

    /// Output field over the storage window (reflection).
    pub fn reflected_record(&self) -> FieldRecord {
        self.record(&self.output, 0, self.flip_index)
    }

    /// Output field over the retrieval window.
    pub fn retrieved_record(&self) -> FieldRecord {
        self.record(&self.output, self.flip_index, self.len() - 1)
    }

    pub fn output_record(&self) -> FieldRecord {
        self.record(&self.output, 0, self.len() - 1)
    }

    /// Retrieval efficiency (retrieval window only).
    pub fn efficiency(&self) -> f64 {
        efficiency(&self.input_record(), &self.retrieved_record()).unwrap_or(0.0)
    }

    /// Largest pointwise violation of `E_out = √(2κ)E − E_in`, relative to
    /// the field scale.
    pub fn input_output_residual(&self) -> f64 {
        let root = (2.0 * self.kappa).sqrt();
        let scale = self
            .output
            .iter()
            .chain(&self.input)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        self.output
            .iter()
            .zip(&self.cavity)
            .zip(&self.input)
            .map(|((o, e), i)| (o - (e * root - i)).norm())
            .fold(0.0, f64::max)
            / scale
    }
}
