use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};

/// Default ratio `|Δ| / max(Ω, g√N, γ_P)` above which the Raman limit is
/// considered reached.
pub const DEFAULT_RAMAN_FACTOR: f64 = 10.0;

/// Raw physical parameters of the atom–cavity system.
///
/// Rates and frequencies are angular (rad per time unit). Any consistent
/// time unit works; the simulators never assume seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryParams {
    /// Single-atom vacuum coupling `g`.
    pub coupling_g: f64,
    /// Number of atoms `N`.
    pub atom_number: f64,
    /// Control-field Rabi frequency `Ω`, constant in time.
    pub rabi_omega: f64,
    /// One-photon detuning `Δ = ω₃ − ω`.
    pub detuning: f64,
    /// Optical dephasing `γ_P`.
    pub gamma_p: f64,
    /// Spin dephasing `γ_S`.
    pub gamma_s: f64,
    /// Cavity half-decay rate `κ` (field decay `2κ`).
    pub kappa: f64,
    /// Medium length `L` in metres.
    pub length: f64,
    /// Control wavelength `λ = 2πc/ω_c` in metres.
    pub control_wavelength: f64,
    #[serde(default = "default_raman_factor")]
    pub raman_factor: f64,
}

fn default_raman_factor() -> f64 {
    DEFAULT_RAMAN_FACTOR
}

impl MemoryParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("coupling_g", self.coupling_g),
            ("atom_number", self.atom_number),
            ("kappa", self.kappa),
            ("length", self.length),
            ("control_wavelength", self.control_wavelength),
            ("raman_factor", self.raman_factor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(MemoryError::invalid(name, format!("must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("rabi_omega", self.rabi_omega),
            ("gamma_p", self.gamma_p),
            ("gamma_s", self.gamma_s),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(MemoryError::invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if !self.detuning.is_finite() {
            return Err(MemoryError::invalid("detuning", "must be finite"));
        }
        if self.detuning == 0.0 {
            return Err(MemoryError::ZeroDetuning);
        }
        Ok(())
    }

    /// Collective vacuum coupling `g√N`.
    pub fn collective_g(&self) -> f64 {
        self.coupling_g * self.atom_number.sqrt()
    }

    pub fn is_raman_limit(&self) -> bool {
        let scale = self
            .rabi_omega
            .abs()
            .max(self.collective_g())
            .max(self.gamma_p);
        // Relative slack absorbs rounding in designs that sit exactly on the margin.
        self.detuning.abs() * (1.0 + 1e-12) >= self.raman_factor * scale
    }

    /// Rate of `k_c` change per unit `dn_c/dt`, times `L/2`: `β = π L ṅ_c / λ`.
    pub fn chirp_rate(&self, slope: f64) -> f64 {
        PI * self.length * slope / self.control_wavelength
    }
}

/// Quantities that follow from [`MemoryParams`] and the index ramp rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Effective spin decay `γ' = γ_S + γ_P Ω²/Δ²`.
    pub gamma_prime: f64,
    /// Effective two-photon coupling `g' = gΩ*/Δ`.
    pub g_prime: f64,
    /// Chirp rate `β`.
    pub beta: f64,
    /// Mode spacing time `δ = π/β`.
    pub delta: f64,
    /// Collective absorption/emission rate `Γ`.
    pub gamma: f64,
    /// Cooperativity `|g'|²N/(κγ')`; infinite when `γ' = 0`.
    pub cooperativity: f64,
    pub kappa: f64,
    pub atom_number: f64,
}

impl DerivedParams {
    /// `g'√N`, the coupling that multiplies the sinc weights.
    pub fn collective_coupling(&self) -> C64 {
        C64::new(self.g_prime * self.atom_number.sqrt(), 0.0)
    }

    /// `Γ` recovered through the cooperativity route `C γ' δ κ / 2`.
    /// Undefined (`None`) when `γ' = 0`.
    pub fn gamma_from_cooperativity(&self) -> Option<f64> {
        (self.gamma_prime > 0.0)
            .then(|| self.cooperativity * self.gamma_prime * self.delta * self.kappa / 2.0)
    }

    /// `|Cγ'δ/2 − 1| = |Γ/κ − 1|`; zero at impedance matching.
    pub fn impedance_residual(&self) -> f64 {
        (self.gamma / self.kappa - 1.0).abs()
    }

    /// Full-cycle efficiency `(2Γ/(κ+Γ))²` at `γ' = 0`.
    pub fn ideal_efficiency(&self) -> f64 {
        let a = 2.0 * self.gamma / (self.kappa + self.gamma);
        a * a
    }
}

/// Compute the effective Raman-limit parameters for an index ramp of rate
/// `slope` (index units per time unit).
pub fn derive_params(params: &MemoryParams, slope: f64) -> Result<DerivedParams> {
    if params.detuning == 0.0 {
        return Err(MemoryError::ZeroDetuning);
    }
    params.validate()?;
    if !(slope.is_finite() && slope > 0.0) {
        return Err(MemoryError::Schedule(format!(
            "index ramp rate must be positive, got {slope}"
        )));
    }
    let ratio = params.rabi_omega / params.detuning;
    let gamma_prime = params.gamma_s + params.gamma_p * ratio * ratio;
    let g_prime = params.coupling_g * ratio;
    let beta = params.chirp_rate(slope);
    let delta = PI / beta;
    let g2n = params.coupling_g * params.coupling_g * params.atom_number;
    let gamma = g2n * ratio * ratio * PI / (2.0 * beta);
    let cooperativity = g_prime * g_prime * params.atom_number / (params.kappa * gamma_prime);
    Ok(DerivedParams {
        gamma_prime,
        g_prime,
        beta,
        delta,
        gamma,
        cooperativity,
        kappa: params.kappa,
        atom_number: params.atom_number,
    })
}

/// Dimensionless targets from which a consistent parameter set is built.
///
/// Picks `Ω = g√N = |Δ|/raman_factor`, which is the largest two-photon
/// coupling compatible with the Raman-limit margin, puts all of `γ'` into
/// `γ_S`, and chooses the ramp rate that yields the requested `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignTargets {
    pub delta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub gamma_prime: f64,
    pub raman_factor: f64,
    pub atom_number: f64,
    pub length: f64,
    pub control_wavelength: f64,
}

impl DesignTargets {
    /// Matched (`κ = Γ`) targets with the default geometry `λ/L = 1e-5`.
    pub fn matched(delta: f64, gamma: f64, gamma_prime: f64) -> Self {
        DesignTargets {
            delta,
            gamma,
            kappa: gamma,
            gamma_prime,
            raman_factor: DEFAULT_RAMAN_FACTOR,
            atom_number: 1e10,
            length: 0.15,
            control_wavelength: 1.5e-6,
        }
    }

    /// Returns the parameters and the index ramp rate.
    pub fn build(&self) -> Result<(MemoryParams, f64)> {
        if !(self.delta > 0.0 && self.gamma >= 0.0 && self.kappa > 0.0) {
            return Err(MemoryError::invalid(
                "design",
                "delta and kappa must be positive, gamma non-negative",
            ));
        }
        // Γ = G²δ/2 with G = g'√N = X²/Δ and X = Δ/r.
        let big_g = (2.0 * self.gamma / self.delta).sqrt();
        let r = self.raman_factor;
        let x = r * big_g;
        let detuning = if big_g > 0.0 { r * x } else { r };
        let slope = self.control_wavelength / (self.delta * self.length);
        let params = MemoryParams {
            coupling_g: if big_g > 0.0 { x } else { 1.0 } / self.atom_number.sqrt(),
            atom_number: self.atom_number,
            rabi_omega: x,
            detuning,
            gamma_p: 0.0,
            gamma_s: self.gamma_prime,
            kappa: self.kappa,
            length: self.length,
            control_wavelength: self.control_wavelength,
            raman_factor: r,
        };
        Ok((params, slope))
    }
}
