use serde::{Deserialize, Serialize};

use super::crosstalk::{crosstalk_approx, crosstalk_exact, CrosstalkSpec};
use crate::error::{MemoryError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRow {
    pub m: u32,
    pub leakage_approx: f64,
    pub leakage_exact: f64,
    /// `1 / Σ_{m'≤m} P_m'`.
    pub cumulative_snr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    /// Index excursion consumed by one stored pulse, `(T/δ)(λ/L)`.
    pub dn_min: f64,
    pub dn_total: f64,
    pub pulses: u64,
    /// Rough delay-bandwidth product; the only available scale is the
    /// cooperativity.
    pub delay_bandwidth_estimate: f64,
    pub channels: Vec<ChannelRow>,
}

pub fn capacity(
    window: f64,
    delta: f64,
    wavelength: f64,
    length: f64,
    dn_total: f64,
    cooperativity: f64,
) -> Result<CapacityReport> {
    for (name, v) in [
        ("window", window),
        ("delta", delta),
        ("wavelength", wavelength),
        ("length", length),
        ("dn_total", dn_total),
        ("cooperativity", cooperativity),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(MemoryError::invalid(name, format!("must be positive, got {v}")));
        }
    }
    let dn_min = (window / delta) * (wavelength / length);
    // 1e-3 / 1e-5 lands a hair below 100 in binary.
    let ratio = dn_total / dn_min;
    let pulses = (ratio * (1.0 + 1e-12)).floor() as u64;
    Ok(CapacityReport {
        dn_min,
        dn_total,
        pulses,
        delay_bandwidth_estimate: cooperativity,
        channels: Vec::new(),
    })
}

impl CapacityReport {
    pub fn with_channel_table(mut self, spec: &CrosstalkSpec, m_max: u32) -> Result<Self> {
        let mut total = 0.0;
        self.channels = (1..=m_max)
            .map(|m| {
                let s = spec.with_m(m);
                let exact = crosstalk_exact(&s)?;
                total += exact;
                Ok(ChannelRow {
                    m,
                    leakage_approx: crosstalk_approx(&s)?,
                    leakage_exact: exact,
                    cumulative_snr: if total > 0.0 { 1.0 / total } else { f64::INFINITY },
                })
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pulse_budget() {
        let r = capacity(1.0, 1.0, 1.5e-6, 0.15, 1e-3, 50.0).unwrap();
        assert!((r.dn_min - 1e-5).abs() < 1e-20);
        assert_eq!(r.pulses, 100);
        assert_eq!(r.delay_bandwidth_estimate, 50.0);
    }

    #[test]
    fn exhausted_budget_gives_zero_pulses() {
        let r = capacity(10.0, 1.0, 1.5e-6, 0.15, 1e-5, 1.0).unwrap();
        assert_eq!(r.pulses, 0);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(capacity(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(capacity(1.0, 1.0, 1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn channel_table_snr_falls_with_m() {
        let r = capacity(1.0, 1.0, 1.5e-6, 0.15, 1e-3, 1.0)
            .unwrap()
            .with_channel_table(&CrosstalkSpec::reference(1), 10)
            .unwrap();
        assert_eq!(r.channels.len(), 10);
        assert!(r.channels.windows(2).all(|w| w[1].cumulative_snr < w[0].cumulative_snr));
    }

    proptest::proptest! {
        #[test]
        fn homogeneity(t in 0.1f64..100.0, d in 0.1f64..10.0, l in 1e-3f64..1.0, s in 0.1f64..10.0) {
            let base = capacity(t, d, 1e-6, l, 1e-3, 1.0).unwrap().dn_min;
            let longer = capacity(t, d, 1e-6, s * l, 1e-3, 1.0).unwrap().dn_min;
            let slower = capacity(s * t, d, 1e-6, l, 1e-3, 1.0).unwrap().dn_min;
            proptest::prop_assert!((longer * s / base - 1.0).abs() < 1e-12);
            proptest::prop_assert!((slower / (s * base) - 1.0).abs() < 1e-12);
        }
    }
}
