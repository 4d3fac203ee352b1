use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};
use crate::model::{DerivedParams, IndexSchedule};

/// Default cap on the number of retained spin-wave modes.
pub const DEFAULT_MAX_MODES: usize = 400;

/// Truncated set of spin-wave modes, labelled by the time `t_q` at which the
/// storage ramp phase-matches them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    /// Integer offset of each mode from the anchor mode.
    pub indices: Vec<i64>,
    pub t_q: Vec<f64>,
    pub q: Vec<f64>,
    pub delta: f64,
    pub q_spacing: f64,
}

impl ModeGrid {
    pub fn len(&self) -> usize {
        self.t_q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_q.is_empty()
    }

    pub fn first_time(&self) -> f64 {
        self.t_q[0]
    }

    pub fn last_time(&self) -> f64 {
        self.t_q[self.t_q.len() - 1]
    }

    /// Whether the resonance times cover `[start, end]`.
    pub fn covers(&self, start: f64, end: f64) -> bool {
        let tol = 1e-9 * self.delta;
        !self.is_empty() && self.first_time() <= start + tol && self.last_time() >= end - tol
    }
}

/// Place modes at integer multiples of `δ` from the schedule anchor so that
/// they span `window` widened by `guard` on both sides. The count includes
/// both endpoints.
pub fn build_mode_grid(
    schedule: &IndexSchedule,
    derived: &DerivedParams,
    window: (f64, f64),
    guard: f64,
    max_modes: usize,
) -> Result<ModeGrid> {
    if !(guard >= 0.0) {
        return Err(MemoryError::invalid("guard", "must be non-negative"));
    }
    if !(window.1 > window.0) {
        return Err(MemoryError::invalid("window", "end must exceed start"));
    }
    let slope = schedule.storage_slope();
    if !(slope > 0.0) {
        return Err(MemoryError::Schedule(
            "storage ramp must have a positive slope".into(),
        ));
    }
    let delta = derived.delta;
    let anchor = schedule.anchor();
    // Fencepost slack so that endpoints landing on the lattice are kept.
    let eps = 1e-9;
    let j_lo = ((window.0 - guard - anchor) / delta - eps).ceil() as i64;
    let j_hi = ((window.1 + guard - anchor) / delta + eps).floor() as i64;
    if j_hi < j_lo {
        return Err(MemoryError::invalid("window", "shorter than one mode spacing"));
    }
    let required = (j_hi - j_lo + 1) as usize;
    if required > max_modes {
        return Err(MemoryError::Truncation {
            required,
            cap: max_modes,
        });
    }
    let k_rate = 2.0 * PI / schedule.control_wavelength() * slope;
    let q_spacing = k_rate * delta;
    let q0 = schedule.anchor_q();
    let indices: Vec<i64> = (j_lo..=j_hi).collect();
    let t_q = indices.iter().map(|&j| anchor + j as f64 * delta).collect();
    let q = indices.iter().map(|&j| q0 - j as f64 * q_spacing).collect();
    Ok(ModeGrid {
        indices,
        t_q,
        q,
        delta,
        q_spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, DesignTargets};

    fn setup(delta: f64) -> (IndexSchedule, DerivedParams, f64) {
        let (p, slope) = DesignTargets::matched(delta, 20.0, 0.0).build().unwrap();
        let k = 2.0 * PI * 2.0 / p.control_wavelength;
        let s = IndexSchedule::triangular(-30.0, 0.0, 30.0, 2.0, slope, p.control_wavelength, k)
            .unwrap();
        (s, derive_params(&p, slope).unwrap(), p.length)
    }

    #[test]
    fn ten_spacings_give_eleven_modes() {
        let (s, d, _) = setup(0.5);
        let g = build_mode_grid(&s, &d, (-5.0, 0.0), 0.0, 1000).unwrap();
        assert_eq!(g.len(), 11);
        let (s, d, _) = setup(0.25);
        let g2 = build_mode_grid(&s, &d, (-5.0, 0.0), 0.0, 1000).unwrap();
        assert_eq!(g2.len(), 21);
    }

    #[test]
    fn figure_run_count() {
        // window [−6, 6], δ = 1/2, guard 5 → t_q = −11, −10.5, …, 11.
        let (s, d, _) = setup(0.5);
        let g = build_mode_grid(&s, &d, (-6.0, 6.0), 5.0, 1000).unwrap();
        let enumerated = (0..)
            .map(|j| -11.0 + 0.5 * j as f64)
            .take_while(|t| *t <= 11.0 + 1e-12)
            .count();
        assert_eq!(enumerated, 45);
        assert_eq!(g.len(), 45);
        assert!(g.covers(-11.0, 11.0));
    }

    #[test]
    fn spacing_invariants() {
        let (s, d, length) = setup(0.5);
        let g = build_mode_grid(&s, &d, (-6.0, 6.0), 5.0, 1000).unwrap();
        for w in g.t_q.windows(2) {
            assert!(((w[1] - w[0]) - d.delta).abs() < 1e-12 * d.delta);
        }
        let dq = 2.0 * PI / length;
        assert!((g.q_spacing - dq).abs() < 1e-12 * dq);
        // Storage-side modes are phase matched at their label time.
        for (q, t) in g.q.iter().zip(&g.t_q).filter(|(_, t)| **t >= -6.0 && **t <= 0.0) {
            let mu = s.mismatch(*q, *t).unwrap();
            assert!(mu.abs() < 1e-9 * s.reference_k(), "{mu}");
        }
    }

    #[test]
    fn cap_reports_required_count() {
        let (s, d, _) = setup(0.5);
        assert_eq!(
            build_mode_grid(&s, &d, (-6.0, 6.0), 5.0, 40),
            Err(MemoryError::Truncation {
                required: 45,
                cap: 40
            })
        );
    }
}
