use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};

/// One linear piece of the control-field index trajectory `n_c(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub n_start: f64,
    /// `dn_c/dt` on this piece.
    pub slope: f64,
    /// The index jumps at `t_start` instead of joining the previous piece.
    #[serde(default)]
    pub reset: bool,
}

impl Segment {
    pub fn n_end(&self) -> f64 {
        self.n_start + self.slope * (self.t_end - self.t_start)
    }

    pub fn index_at(&self, t: f64) -> f64 {
        self.n_start + self.slope * (t - self.t_start)
    }
}

/// Piecewise-linear index trajectory plus the fixed quantum-field wave
/// number. The anchor is the time at which the mode `q = k − k_c(anchor)`
/// is phase matched; the mode grid and the phase compensation refer to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSchedule {
    segments: Vec<Segment>,
    control_wavelength: f64,
    reference_k: f64,
    anchor: f64,
}

impl IndexSchedule {
    pub fn new(
        segments: Vec<Segment>,
        control_wavelength: f64,
        reference_k: f64,
        anchor: f64,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(MemoryError::Schedule("no segments".into()));
        }
        if !(control_wavelength > 0.0) {
            return Err(MemoryError::Schedule("control wavelength must be positive".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.t_end > s.t_start) || !s.slope.is_finite() || !s.n_start.is_finite() {
                return Err(MemoryError::Schedule(format!("segment {i} is degenerate")));
            }
            if i > 0 {
                let prev = &segments[i - 1];
                let tol = 1e-12 * (1.0 + prev.t_end.abs());
                if (s.t_start - prev.t_end).abs() > tol {
                    return Err(MemoryError::Schedule(format!(
                        "segment {i} starts at {} but segment {} ends at {}",
                        s.t_start,
                        i - 1,
                        prev.t_end
                    )));
                }
                let ntol = 1e-12 * (1.0 + prev.n_end().abs());
                if !s.reset && (s.n_start - prev.n_end()).abs() > ntol {
                    return Err(MemoryError::Schedule(format!(
                        "index jumps at t = {} without a reset flag",
                        s.t_start
                    )));
                }
            }
        }
        let sched = IndexSchedule {
            segments,
            control_wavelength,
            reference_k,
            anchor,
        };
        sched.check_time(anchor)?;
        Ok(sched)
    }

    /// Ramp up over `[start, flip]`, then back down over `[flip, end]` with
    /// the opposite slope (backward retrieval).
    pub fn triangular(
        start: f64,
        flip: f64,
        end: f64,
        n_flip: f64,
        slope: f64,
        control_wavelength: f64,
        reference_k: f64,
    ) -> Result<Self> {
        let up = Segment {
            t_start: start,
            t_end: flip,
            n_start: n_flip - slope * (flip - start),
            slope,
            reset: false,
        };
        let down = Segment {
            t_start: flip,
            t_end: end,
            n_start: n_flip,
            slope: -slope,
            reset: false,
        };
        Self::new(vec![up, down], control_wavelength, reference_k, flip)
    }

    /// Ramp over `[start, flip]`, reset to the starting index at `flip`, and
    /// ramp again with the same slope (forward retrieval).
    pub fn repeated_ramp(
        start: f64,
        flip: f64,
        end: f64,
        n_flip: f64,
        slope: f64,
        control_wavelength: f64,
        reference_k: f64,
    ) -> Result<Self> {
        let n0 = n_flip - slope * (flip - start);
        let first = Segment {
            t_start: start,
            t_end: flip,
            n_start: n0,
            slope,
            reset: false,
        };
        let second = Segment {
            t_start: flip,
            t_end: end,
            n_start: n0,
            slope,
            reset: true,
        };
        Self::new(vec![first, second], control_wavelength, reference_k, flip)
    }

    pub fn constant(
        start: f64,
        end: f64,
        n: f64,
        control_wavelength: f64,
        reference_k: f64,
    ) -> Result<Self> {
        let seg = Segment {
            t_start: start,
            t_end: end,
            n_start: n,
            slope: 0.0,
            reset: false,
        };
        Self::new(vec![seg], control_wavelength, reference_k, start)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn control_wavelength(&self) -> f64 {
        self.control_wavelength
    }

    pub fn reference_k(&self) -> f64 {
        self.reference_k
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn start(&self) -> f64 {
        self.segments[0].t_start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].t_end
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (start, end) = (self.start(), self.end());
        let tol = 1e-12 * (1.0 + start.abs().max(end.abs()));
        if t < start - tol || t > end + tol || t.is_nan() {
            return Err(MemoryError::OutOfRange { t, start, end });
        }
        Ok(())
    }

    /// Segment in force at `t`. At a join the earlier segment wins for
    /// `t <= anchor` and the later one otherwise.
    fn segment_at(&self, t: f64) -> &Segment {
        self.segment_from_side(t, t > self.anchor)
    }

    fn segment_from_side(&self, t: f64, right: bool) -> &Segment {
        let found = if right {
            self.segments.iter().rev().find(|s| s.t_start <= t)
        } else {
            self.segments.iter().find(|s| t <= s.t_end)
        };
        found.unwrap_or(if right {
            &self.segments[0]
        } else {
            &self.segments[self.segments.len() - 1]
        })
    }

    /// `n_c(t)`. Unchecked; callers outside the span get the nearest segment
    /// extrapolated.
    pub(crate) fn index_unchecked(&self, t: f64) -> f64 {
        self.segment_at(t).index_at(t)
    }

    /// `k_c` as a one-sided limit, for integrators that step across a reset.
    pub(crate) fn control_k_one_sided(&self, t: f64, right: bool) -> f64 {
        2.0 * PI * self.segment_from_side(t, right).index_at(t) / self.control_wavelength
    }

    /// `dn_c/dt` as a one-sided limit.
    pub(crate) fn slope_one_sided(&self, t: f64, right: bool) -> f64 {
        self.segment_from_side(t, right).slope
    }

    pub fn index_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.index_unchecked(t))
    }

    /// Control wave number `k_c(t) = 2π n_c(t) / λ`.
    pub fn control_k(&self, t: f64) -> Result<f64> {
        Ok(2.0 * PI * self.index_at(t)? / self.control_wavelength)
    }

    pub(crate) fn control_k_unchecked(&self, t: f64) -> f64 {
        2.0 * PI * self.index_unchecked(t) / self.control_wavelength
    }

    /// Phase-mismatch `μ_q(t) = q + k_c(t) − k`.
    pub fn mismatch(&self, q: f64, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(q + self.control_k_unchecked(t) - self.reference_k)
    }

    /// Index ramp rate of the segment that ends at the anchor (the storage
    /// ramp).
    pub fn storage_slope(&self) -> f64 {
        self.segment_at(self.anchor).slope
    }

    /// Wave vector phase matched at the anchor.
    pub fn anchor_q(&self) -> f64 {
        self.reference_k - self.control_k_unchecked(self.anchor)
    }

    /// Largest |n_c(t) − n_c(s)| over the span: the index excursion consumed.
    pub fn excursion(&self) -> f64 {
        let values: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.n_start, s.n_end()])
            .collect();
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }

    /// All times at which `μ_q` vanishes, in increasing order.
    pub fn resonance_times(&self, q: f64) -> Vec<f64> {
        // n_c value at which q is phase matched.
        let n_target = (self.reference_k - q) * self.control_wavelength / (2.0 * PI);
        let mut roots: Vec<f64> = Vec::new();
        for s in &self.segments {
            if s.slope == 0.0 {
                continue;
            }
            let t = s.t_start + (n_target - s.n_start) / s.slope;
            let tol = 1e-9 * (s.t_end - s.t_start);
            if t < s.t_start - tol || t > s.t_end + tol {
                continue;
            }
            let t = t.clamp(s.t_start, s.t_end);
            // A root on a continuous join is reported once.
            let repeated = !s.reset && roots.last().is_some_and(|&r| (r - t).abs() <= tol);
            if !repeated {
                roots.push(t);
            }
        }
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: f64 = 1.5e-6;
    const L: f64 = 0.15;

    fn k_ref() -> f64 {
        2.0 * PI * 2.0 / LAMBDA
    }

    fn tri() -> IndexSchedule {
        // δ = λ/(L ṅ) = 0.5
        IndexSchedule::triangular(-6.0, 0.0, 6.0, 2.0, 2e-5, LAMBDA, k_ref()).unwrap()
    }

    #[test]
    fn root_on_segment_is_found() {
        let s = IndexSchedule::new(
            vec![Segment {
                t_start: -1.0,
                t_end: 1.0,
                n_start: 2.0,
                slope: 1e-5,
                reset: false,
            }],
            LAMBDA,
            k_ref(),
            0.0,
        )
        .unwrap();
        let t_star = 0.37;
        let q = k_ref() - s.control_k(t_star).unwrap();
        let roots = s.resonance_times(q);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - t_star).abs() < 1e-9);
        assert!(s.mismatch(q, roots[0]).unwrap().abs() < 1e-9 * k_ref());
    }

    #[test]
    fn triangular_schedule_mirrors_resonances() {
        let s = tri();
        let q0 = s.anchor_q();
        for j in 1..=11 {
            let q = q0 + j as f64 * 2.0 * PI / L;
            let roots = s.resonance_times(q);
            assert_eq!(roots.len(), 2, "mode {j}: {roots:?}");
            assert!((roots[0] + roots[1]).abs() < 1e-9);
            assert!(roots[0] < 0.0);
        }
        // The anchor mode is resonant exactly once, at the apex.
        let roots = s.resonance_times(q0);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].abs() < 1e-9);
    }

    #[test]
    fn constant_index_has_no_roots_off_resonance() {
        let s = IndexSchedule::constant(-1.0, 1.0, 2.0, LAMBDA, k_ref()).unwrap();
        let q = 3.0 * 2.0 * PI / L;
        assert!(s.resonance_times(q).is_empty());
        let m0 = s.mismatch(q, -0.5).unwrap();
        let m1 = s.mismatch(q, 0.9).unwrap();
        assert_eq!(m0, m1);
    }

    #[test]
    fn mismatch_is_linear_in_time_on_a_segment() {
        let s = tri();
        let q = s.anchor_q() + 4.0 * 2.0 * PI / L;
        let t_q = s.resonance_times(q)[0];
        let rate = 2.0 * PI / LAMBDA * s.storage_slope();
        for t in [-5.5, -3.1, -0.2] {
            let expected = rate * (t - t_q);
            assert!((s.mismatch(q, t).unwrap() - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn outside_span_is_an_error() {
        let s = tri();
        assert!(matches!(
            s.mismatch(0.0, 7.0),
            Err(MemoryError::OutOfRange { .. })
        ));
    }

    #[test]
    fn discontinuity_requires_reset() {
        let a = Segment {
            t_start: 0.0,
            t_end: 1.0,
            n_start: 2.0,
            slope: 1e-5,
            reset: false,
        };
        let mut b = Segment {
            t_start: 1.0,
            t_end: 2.0,
            n_start: 2.0,
            slope: 1e-5,
            reset: false,
        };
        assert!(IndexSchedule::new(vec![a, b], LAMBDA, k_ref(), 0.0).is_err());
        b.reset = true;
        assert!(IndexSchedule::new(vec![a, b], LAMBDA, k_ref(), 0.0).is_ok());
        let gap = Segment { t_start: 1.5, ..b };
        assert!(IndexSchedule::new(vec![a, gap], LAMBDA, k_ref(), 0.0).is_err());
    }

    #[test]
    fn repeated_ramp_delays_resonances_by_window() {
        let s = IndexSchedule::repeated_ramp(-6.0, 0.0, 6.0, 2.0, 2e-5, LAMBDA, k_ref())
            .unwrap();
        let q = s.anchor_q() + 5.0 * 2.0 * PI / L;
        let roots = s.resonance_times(q);
        assert_eq!(roots.len(), 2);
        assert!((roots[1] - roots[0] - 6.0).abs() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn roots_zero_the_mismatch(frac in -0.999f64..0.999) {
            let s = tri();
            let q = s.reference_k() - s.control_k(6.0 * frac).unwrap();
            let roots = s.resonance_times(q);
            proptest::prop_assert!(!roots.is_empty());
            for r in roots {
                proptest::prop_assert!(s.mismatch(q, r).unwrap().abs() < 1e-9 * s.reference_k());
            }
        }
    }
}
