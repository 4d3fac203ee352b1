use std::f64::consts::{LN_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};
use crate::numeric;

/// Half-width of the required pulse grid, in units of the FWHM.
pub const GRID_HALF_WIDTH_FWHM: f64 = 6.0;
/// Envelope magnitude allowed at the grid edges, relative to the peak.
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;

/// Uniform time grid `start + i·dt`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, dt: f64, len: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || len < 2 {
            return Err(MemoryError::invalid("grid", "needs dt > 0 and at least two samples"));
        }
        Ok(TimeGrid { start, dt, len })
    }

    /// Grid covering `[start, end]` with a step no larger than `max_dt`.
    pub fn spanning(start: f64, end: f64, max_dt: f64) -> Result<Self> {
        if !(end > start) {
            return Err(MemoryError::invalid("grid", "end must exceed start"));
        }
        let steps = ((end - start) / max_dt).ceil().max(1.0) as usize;
        Self::new(start, (end - start) / steps as f64, steps + 1)
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Gaussian,
    Sampled,
}

/// Input wave packet `E_in(t)`, sampled on its own grid.
///
/// Gaussian pulses are also evaluated analytically between samples; sampled
/// pulses are linearly interpolated and vanish outside their grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub kind: PulseKind,
    /// Intensity FWHM.
    pub fwhm: f64,
    pub center: f64,
    pub grid: TimeGrid,
    pub envelope: Vec<C64>,
    amplitude: C64,
}

fn gaussian_peak(fwhm: f64) -> f64 {
    // ∫ A² exp(−4 ln2 t²/τ²) dt = A² τ √(π / 4ln2) = 1
    (4.0 * LN_2 / PI).powf(0.25) / fwhm.sqrt()
}

/// Unit-energy Gaussian whose intensity FWHM is `fwhm`.
pub fn make_gaussian_pulse(fwhm: f64, center: f64, grid: TimeGrid) -> Result<Pulse> {
    if !(fwhm > 0.0 && fwhm.is_finite()) {
        return Err(MemoryError::invalid("fwhm", "must be positive"));
    }
    if grid.dt > fwhm / 4.0 {
        return Err(MemoryError::invalid(
            "grid",
            format!("step {} under-resolves a pulse of FWHM {fwhm}", grid.dt),
        ));
    }
    let need_start = center - GRID_HALF_WIDTH_FWHM * fwhm;
    let need_end = center + GRID_HALF_WIDTH_FWHM * fwhm;
    let slack = 1e-9 * fwhm;
    if grid.start > need_start + slack || grid.end() < need_end - slack {
        return Err(MemoryError::BoundaryLeakage {
            need_start,
            need_end,
            have_start: grid.start,
            have_end: grid.end(),
        });
    }
    let mut pulse = Pulse {
        kind: PulseKind::Gaussian,
        fwhm,
        center,
        grid,
        envelope: Vec::new(),
        amplitude: C64::new(1.0, 0.0),
    };
    pulse.envelope = (0..grid.len).map(|i| pulse.eval(grid.time(i))).collect();
    Ok(pulse)
}

impl Pulse {
    /// Pulse from arbitrary samples, rescaled to unit energy.
    pub fn from_samples(grid: TimeGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(MemoryError::invalid("envelope", "length differs from grid"));
        }
        let e = riemann_energy(&samples, grid.dt);
        if !(e > 0.0) {
            return Err(MemoryError::UndefinedEfficiency);
        }
        let peak = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let edge = samples[0].norm().max(samples[samples.len() - 1].norm());
        if edge > BOUNDARY_THRESHOLD * peak {
            return Err(MemoryError::BoundaryLeakage {
                need_start: f64::NAN,
                need_end: f64::NAN,
                have_start: grid.start,
                have_end: grid.end(),
            });
        }
        let scale = 1.0 / e.sqrt();
        let envelope: Vec<C64> = samples.into_iter().map(|z| z * scale).collect();
        let times = grid.times();
        let intensity: Vec<f64> = envelope.iter().map(|z| z.norm_sqr()).collect();
        let fwhm = numeric::intensity_fwhm(&times, &intensity).unwrap_or(f64::NAN);
        let center = times
            .iter()
            .zip(&intensity)
            .map(|(t, i)| t * i)
            .sum::<f64>()
            / intensity.iter().sum::<f64>();
        Ok(Pulse {
            kind: PulseKind::Sampled,
            fwhm,
            center,
            grid,
            envelope,
            amplitude: C64::new(1.0, 0.0),
        })
    }

    /// Same shape, multiplied by a complex amplitude (energy `|c|²`).
    pub fn scaled(&self, c: C64) -> Pulse {
        Pulse {
            envelope: self.envelope.iter().map(|z| z * c).collect(),
            amplitude: self.amplitude * c,
            ..self.clone()
        }
    }

    /// Same shape moved later by `dt`.
    pub fn shifted(&self, dt: f64) -> Pulse {
        Pulse {
            center: self.center + dt,
            grid: TimeGrid {
                start: self.grid.start + dt,
                ..self.grid
            },
            ..self.clone()
        }
    }

    /// Envelope at an arbitrary time.
    pub fn eval(&self, t: f64) -> C64 {
        match self.kind {
            PulseKind::Gaussian => {
                let x = (t - self.center) / self.fwhm;
                self.amplitude * gaussian_peak(self.fwhm) * (-2.0 * LN_2 * x * x).exp()
            }
            PulseKind::Sampled => {
                let u = (t - self.grid.start) / self.grid.dt;
                if u < 0.0 || u > (self.grid.len - 1) as f64 {
                    return C64::new(0.0, 0.0);
                }
                let i = (u.floor() as usize).min(self.grid.len - 2);
                let w = u - i as f64;
                self.envelope[i] * (1.0 - w) + self.envelope[i + 1] * w
            }
        }
    }

    /// `Σ|E|² dt` over the pulse grid.
    pub fn energy(&self) -> f64 {
        riemann_energy(&self.envelope, self.grid.dt)
    }

    /// Largest edge magnitude relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.envelope.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let n = self.envelope.len();
        self.envelope[0].norm().max(self.envelope[n - 1].norm()) / peak
    }
}

fn riemann_energy(samples: &[C64], dt: f64) -> f64 {
    samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_for(fwhm: f64, center: f64, dt: f64) -> TimeGrid {
        TimeGrid::spanning(center - 6.0 * fwhm, center + 6.0 * fwhm, dt).unwrap()
    }

    #[test]
    fn unit_energy_for_any_width() {
        for fwhm in [0.3, 1.0, 2.5] {
            let p = make_gaussian_pulse(fwhm, -1.0, grid_for(fwhm, -1.0, fwhm / 20.0)).unwrap();
            assert!((p.energy() - 1.0).abs() < 1e-10, "{}", p.energy());
            assert!(p.edge_ratio() < BOUNDARY_THRESHOLD);
        }
    }

    #[test]
    fn half_intensity_at_half_width() {
        let fwhm = 1.3;
        let p = make_gaussian_pulse(fwhm, 0.5, grid_for(fwhm, 0.5, 0.01)).unwrap();
        let peak = p.eval(0.5).norm_sqr();
        for t in [0.5 - fwhm / 2.0, 0.5 + fwhm / 2.0] {
            let ratio = p.eval(t).norm_sqr() / peak;
            assert!((ratio - 0.5).abs() < 0.005, "{ratio}");
        }
    }

    #[test]
    fn even_about_center() {
        let p = make_gaussian_pulse(1.0, -3.0, grid_for(1.0, -3.0, 0.01)).unwrap();
        for d in [0.1, 0.77, 2.0] {
            assert!((p.eval(-3.0 + d) - p.eval(-3.0 - d)).norm() < 1e-15);
        }
        // Autocorrelation peaks at zero lag.
        let n = p.envelope.len();
        let ac = |lag: usize| -> f64 {
            (0..n - lag)
                .map(|i| (p.envelope[i] * p.envelope[i + lag].conj()).re)
                .sum()
        };
        assert!(ac(0) > ac(1) && ac(1) > ac(5));
    }

    #[test]
    fn short_grid_is_rejected() {
        let grid = TimeGrid::spanning(-3.0, 3.0, 0.01).unwrap();
        assert!(matches!(
            make_gaussian_pulse(1.0, 0.0, grid),
            Err(MemoryError::BoundaryLeakage { .. })
        ));
    }

    #[test]
    fn refinement_keeps_energy() {
        let a = make_gaussian_pulse(1.0, 0.0, grid_for(1.0, 0.0, 0.1)).unwrap();
        let b = make_gaussian_pulse(1.0, 0.0, grid_for(1.0, 0.0, 0.05)).unwrap();
        assert!((a.energy() - b.energy()).abs() < 1e-6);
    }

    #[test]
    fn sampled_pulse_normalizes_and_interpolates() {
        let grid = TimeGrid::spanning(-10.0, 10.0, 0.01).unwrap();
        let raw: Vec<C64> = grid
            .times()
            .iter()
            .map(|t| C64::new(3.0 * (-t * t).exp(), 0.0))
            .collect();
        let p = Pulse::from_samples(grid, raw).unwrap();
        assert!((p.energy() - 1.0).abs() < 1e-12);
        assert!(p.center.abs() < 1e-9);
        assert_eq!(p.eval(11.0), C64::new(0.0, 0.0));
        let mid = p.eval(0.005);
        assert!((mid - 0.5 * (p.envelope[1000] + p.envelope[1001])).norm() < 1e-12);
    }
}
