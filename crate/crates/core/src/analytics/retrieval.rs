use std::f64::consts::LN_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{FieldRecord, SpinWaveState};
use crate::error::{MemoryError, Result};
use crate::model::{DerivedParams, ModeGrid, Pulse};

/// Bandwidth-to-`(κ+Γ)` ratio above which the cavity can no longer be
/// eliminated adiabatically.
pub const ADIABATIC_LIMIT: f64 = 0.1;

/// Angular bandwidth of a transform-limited Gaussian with the pulse's
/// intensity FWHM, `4 ln2 / τ_p`.
pub fn pulse_bandwidth(pulse: &Pulse) -> f64 {
    4.0 * LN_2 / pulse.fwhm
}

#[derive(Debug, Clone, PartialEq)]
pub struct Imprint {
    pub state: SpinWaveState,
    /// `bandwidth / (κ + Γ)`.
    pub bandwidth_ratio: f64,
}

impl Imprint {
    pub fn is_adiabatic(&self) -> bool {
        self.bandwidth_ratio <= ADIABATIC_LIMIT
    }
}

/// Stored amplitudes predicted with the cavity eliminated:
/// `S_q(0) = i g'√N √(2κ)/(κ+Γ) · δ · E_in(t_q) · e^{(iβ+γ')t_q}`.
pub fn analytic_spin_imprint(
    pulse: &Pulse,
    derived: &DerivedParams,
    kappa: f64,
    modes: &ModeGrid,
) -> Imprint {
    let prefactor = C64::new(0.0, 1.0)
        * derived.collective_coupling()
        * ((2.0 * kappa).sqrt() / (kappa + derived.gamma))
        * derived.delta;
    let amplitudes = modes
        .t_q
        .iter()
        .map(|&t| {
            let evolution = C64::new(derived.gamma_prime * t, derived.beta * t).exp();
            prefactor * pulse.eval(t) * evolution
        })
        .collect();
    Imprint {
        state: SpinWaveState {
            time: 0.0,
            modes: modes.clone(),
            amplitudes,
            cavity: C64::new(0.0, 0.0),
        },
        bandwidth_ratio: pulse_bandwidth(pulse) / (kappa + derived.gamma),
    }
}

/// `−2Γ/(κ+Γ)`.
pub fn retrieval_amplitude(gamma: f64, kappa: f64) -> f64 {
    -2.0 * gamma / (kappa + gamma)
}

pub fn backward_envelope(pulse: &Pulse, gamma: f64, kappa: f64, gamma_prime: f64, t: f64) -> C64 {
    retrieval_amplitude(gamma, kappa) * pulse.eval(-t) * (-2.0 * gamma_prime * t).exp()
}

pub fn forward_envelope(
    pulse: &Pulse,
    gamma: f64,
    kappa: f64,
    gamma_prime: f64,
    delay: f64,
    t: f64,
) -> C64 {
    retrieval_amplitude(gamma, kappa) * pulse.eval(t - delay) * (-gamma_prime * delay).exp()
}

/// `E_out(t) = −(2Γ/(κ+Γ)) E_in(−t) e^{−2γ't}` on the mirror image of the
/// pulse grid.
pub fn analytic_backward(pulse: &Pulse, gamma: f64, kappa: f64, gamma_prime: f64) -> FieldRecord {
    let grid = pulse.grid;
    let record = FieldRecord::new(-grid.end(), grid.dt, vec![C64::new(0.0, 0.0); grid.len]);
    let samples = record.sample_like(|t| backward_envelope(pulse, gamma, kappa, gamma_prime, t));
    FieldRecord { samples, ..record }
}

/// `E_out(t) = −(2Γ/(κ+Γ)) E_in(t − T) e^{−γ'T}` on the pulse grid delayed
/// by `T`.
pub fn analytic_forward(
    pulse: &Pulse,
    gamma: f64,
    kappa: f64,
    gamma_prime: f64,
    delay: f64,
) -> FieldRecord {
    let grid = pulse.grid;
    let record = FieldRecord::new(grid.start + delay, grid.dt, vec![C64::new(0.0, 0.0); grid.len]);
    let samples =
        record.sample_like(|t| forward_envelope(pulse, gamma, kappa, gamma_prime, delay, t));
    FieldRecord { samples, ..record }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaPoint {
    pub kappa: f64,
    pub efficiency: f64,
    /// The formula stays at or below 1 here. Below `κ = Γ` it exceeds 1 and
    /// cannot describe a passive memory.
    pub admissible: bool,
}

/// `η(κ) = (2Γ/(κ+Γ))²` at `γ' = 0`.
pub fn efficiency_vs_kappa(gamma: f64, kappa_grid: &[f64]) -> Result<Vec<KappaPoint>> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(MemoryError::invalid("gamma", "must be non-negative"));
    }
    kappa_grid
        .iter()
        .map(|&kappa| {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(MemoryError::invalid("kappa", format!("must be positive, got {kappa}")));
            }
            let efficiency = retrieval_amplitude(gamma, kappa).powi(2);
            Ok(KappaPoint {
                kappa,
                efficiency,
                admissible: efficiency <= 1.0 + 1e-12,
            })
        })
        .collect()
}

/// `(4κΓ/(κ+Γ)²)²`: the same adiabatic limit with the spin reabsorption of
/// the cavity field kept during retrieval as well as storage.
pub fn efficiency_with_reabsorption(gamma: f64, kappa: f64) -> f64 {
    (4.0 * kappa * gamma / (kappa + gamma).powi(2)).powi(2)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    }
}
