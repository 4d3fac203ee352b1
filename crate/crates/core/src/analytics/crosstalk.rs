use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ensemble::dirichlet;
use crate::error::{MemoryError, Result};
use crate::numeric::{adaptive_simpson, sinc};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `δk/k` above which the narrowband expansion is flagged.
pub const NARROWBAND_LIMIT: f64 = 1e-2;

const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Two frequency channels whose stored spin waves differ by `2πm/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkSpec {
    pub m: u32,
    /// Signal bandwidth `δω`, rad/s.
    pub bandwidth: f64,
    /// Carrier `ω`, rad/s.
    pub carrier: f64,
    pub length: f64,
    /// Vacuum wavelength.
    pub wavelength: f64,
    pub index: f64,
}

impl CrosstalkSpec {
    /// `L = 1e5 λ`, `ω/2π = 2e14 Hz`, `δω/2π = 50 MHz`, `n = 2`.
    pub fn reference(m: u32) -> Self {
        let carrier = 2.0 * PI * 2e14;
        let wavelength = 2.0 * PI * SPEED_OF_LIGHT / carrier;
        CrosstalkSpec {
            m,
            bandwidth: 2.0 * PI * 50e6,
            carrier,
            length: 1e5 * wavelength,
            wavelength,
            index: 2.0,
        }
    }

    pub fn with_m(self, m: u32) -> Self {
        CrosstalkSpec { m, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("carrier", self.carrier),
            ("length", self.length),
            ("wavelength", self.wavelength),
            ("index", self.index),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(MemoryError::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.bandwidth >= 0.0 && self.bandwidth.is_finite()) {
            return Err(MemoryError::invalid("bandwidth", "must be non-negative"));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        2.0 * PI * self.index / self.wavelength
    }

    /// `δk = δω n / c`.
    pub fn delta_k(&self) -> f64 {
        self.bandwidth * self.index / SPEED_OF_LIGHT
    }

    pub fn channel_spacing(&self) -> f64 {
        2.0 * PI * self.m as f64 / self.length
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ratio = self.delta_k() / self.k();
        if ratio > NARROWBAND_LIMIT {
            out.push(format!("δk/k = {ratio:.3e} exceeds {NARROWBAND_LIMIT:e}"));
        }
        let implied = 2.0 * PI * SPEED_OF_LIGHT / self.carrier;
        let mismatch = (implied / self.wavelength - 1.0).abs();
        if mismatch > 1e-6 {
            out.push(format!(
                "carrier implies λ = {implied:.6e} m but wavelength is {:.6e} m",
                self.wavelength
            ));
        }
        out
    }
}

/// `P_m = (1/12)·[(δω/ω)(L/λ)(n/m)]²`.
pub fn crosstalk_approx(spec: &CrosstalkSpec) -> Result<f64> {
    spec.validate()?;
    if spec.m == 0 {
        return Err(MemoryError::SameChannel);
    }
    let x = (spec.bandwidth / spec.carrier) * (spec.length / spec.wavelength)
        * (spec.index / spec.m as f64);
    Ok(x * x / 12.0)
}

/// Flat-spectrum average of `sinc²(πm + xL/2)` over `x ∈ [−δk/2, δk/2]`.
pub fn crosstalk_exact(spec: &CrosstalkSpec) -> Result<f64> {
    spec.validate()?;
    if spec.m == 0 {
        return Err(MemoryError::SameChannel);
    }
    let half = 0.5 * spec.delta_k();
    let center = PI * spec.m as f64;
    if half == 0.0 {
        return Ok(sinc(center).powi(2));
    }
    let l = spec.length;
    let integral = adaptive_simpson(
        |x| sinc(center + 0.5 * x * l).powi(2),
        -half,
        half,
        QUADRATURE_TOLERANCE,
    )?;
    Ok(integral / (2.0 * half))
}

/// Sum of exact leakage over `m = 1..=m_max`.
pub fn total_leakage(spec: &CrosstalkSpec, m_max: u32) -> Result<f64> {
    (1..=m_max).map(|m| crosstalk_exact(&spec.with_m(m))).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEnergies {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelIsolation {
    pub m: u32,
    pub atoms: usize,
    /// Energy read out at channel A when only channel B was written.
    pub leakage: f64,
    /// [`crosstalk_exact`] for the same spec; absent at `m = 0`.
    pub predicted: Option<f64>,
    /// Both channels written, then read A first.
    pub a_then_b: ChannelEnergies,
    /// Both channels written, then read B first.
    pub b_then_a: ChannelEnergies,
}

impl ChannelIsolation {
    pub fn leakage_ratio(&self) -> Option<f64> {
        self.predicted.map(|p| self.leakage / p)
    }

    pub fn order_residual(&self) -> f64 {
        (self.a_then_b.a - self.b_then_a.a)
            .abs()
            .max((self.a_then_b.b - self.b_then_a.b).abs())
    }
}

const SPECTRAL_POINTS: usize = 401;
const SPECTRAL_SPAN: f64 = 6.0;

/// Stores two channels on a uniform lattice of `atoms` sites and reads them
/// back by projecting onto each carrier-matched spin wave.
///
/// Each channel is a Gaussian spread of wave vectors around its carrier with
/// the same variance as a flat band of width `δk`, so the small-bandwidth
/// leakage coincides with [`crosstalk_exact`]. A readout removes what it
/// extracts from the stored state, which makes read order observable.
pub fn channel_isolation_demo(spec: &CrosstalkSpec, atoms: usize) -> Result<ChannelIsolation> {
    spec.validate()?;
    if atoms < 2 {
        return Err(MemoryError::invalid("atoms", "needs at least 2 sites"));
    }
    let spacing = spec.channel_spacing();
    let dk = spec.delta_k();
    if spec.m != 0 && spacing < dk {
        return Err(MemoryError::Config(format!(
            "channel spacing {spacing:.4e} rad/m is narrower than the signal band {dk:.4e} rad/m"
        )));
    }
    if 2 * spec.m as usize >= atoms {
        return Err(MemoryError::Config(format!(
            "offset m = {} aliases on a lattice of {atoms} sites",
            spec.m
        )));
    }

    let sigma = dk / 12f64.sqrt();
    let spectrum: Vec<(f64, f64)> = if sigma == 0.0 {
        vec![(0.0, 1.0)]
    } else {
        let raw: Vec<(f64, f64)> = (0..SPECTRAL_POINTS)
            .map(|i| {
                let u = -SPECTRAL_SPAN + 2.0 * SPECTRAL_SPAN * i as f64 / (SPECTRAL_POINTS - 1) as f64;
                (u * sigma, (-0.5 * u * u).exp())
            })
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        raw.into_iter().map(|(x, w)| (x, w / total)).collect()
    };

    let lattice = Lattice {
        atoms,
        length: spec.length,
        carriers: [0.0, spacing],
    };
    let leakage = lattice.read_sequence(&spectrum, [false, true], &[0])[0];
    let both = [true, true];
    let ab = lattice.read_sequence(&spectrum, both, &[0, 1]);
    let ba = lattice.read_sequence(&spectrum, both, &[1, 0]);
    let predicted = if spec.m == 0 {
        None
    } else {
        Some(crosstalk_exact(spec)?)
    };
    Ok(ChannelIsolation {
        m: spec.m,
        atoms,
        leakage,
        predicted,
        a_then_b: ChannelEnergies { a: ab[0], b: ab[1] },
        b_then_a: ChannelEnergies { a: ba[1], b: ba[0] },
    })
}

struct Lattice {
    atoms: usize,
    length: f64,
    carriers: [f64; 2],
}

impl Lattice {
    fn overlap(&self, q: f64) -> C64 {
        dirichlet(self.atoms, self.length, q)
    }

    /// Retrieved energy for each channel in `order`.
    ///
    /// Per spectral component the state is `Σ_c v_c(x) − Σ_r b_r u_r`, with
    /// `v_c(x)` the written wave at `k_c + x` and `u_r` the readout wave at
    /// `k_r`; only their mutual overlaps are needed.
    fn read_sequence(&self, spectrum: &[(f64, f64)], written: [bool; 2], order: &[usize]) -> Vec<f64> {
        let mut energies = vec![0.0; order.len()];
        for &(x, weight) in spectrum {
            let mut removed: Vec<(usize, C64)> = Vec::with_capacity(order.len());
            for (slot, &r) in order.iter().enumerate() {
                let kr = self.carriers[r];
                let mut amp = C64::new(0.0, 0.0);
                for c in 0..2 {
                    if written[c] {
                        amp += self.overlap(self.carriers[c] + x - kr);
                    }
                }
                for &(prev, b) in &removed {
                    amp -= b * self.overlap(self.carriers[prev] - kr);
                }
                energies[slot] += weight * amp.norm_sqr();
                removed.push((r, amp));
            }
        }
        energies
    }
}
