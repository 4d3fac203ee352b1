use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MemoryError, Result};
use crate::numeric::sinc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Placement {
    /// `z_j = (j + ½) L / N`.
    Uniform,
    /// Independent uniform positions drawn from a ChaCha8 stream.
    Random { seed: u64 },
}

/// Atom positions along the medium, sorted, all inside `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomEnsemble {
    positions: Vec<f64>,
    length: f64,
    placement: Placement,
}

impl AtomEnsemble {
    pub fn uniform(count: usize, length: f64) -> Result<Self> {
        check(count, length)?;
        let step = length / count as f64;
        Ok(AtomEnsemble {
            positions: (0..count).map(|j| (j as f64 + 0.5) * step).collect(),
            length,
            placement: Placement::Uniform,
        })
    }

    pub fn random(count: usize, length: f64, seed: u64) -> Result<Self> {
        check(count, length)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..=length)).collect();
        positions.sort_by(f64::total_cmp);
        Ok(AtomEnsemble {
            positions,
            length,
            placement: Placement::Random { seed },
        })
    }

    pub fn new(placement: Placement, count: usize, length: f64) -> Result<Self> {
        match placement {
            Placement::Uniform => Self::uniform(count, length),
            Placement::Random { seed } => Self::random(count, length, seed),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn seed(&self) -> Option<u64> {
        match self.placement {
            Placement::Random { seed } => Some(seed),
            Placement::Uniform => None,
        }
    }
}

fn check(count: usize, length: f64) -> Result<()> {
    if count == 0 {
        return Err(MemoryError::invalid("atom count", "must be at least 1"));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(MemoryError::invalid("length", "must be positive"));
    }
    Ok(())
}

/// `φ(q) = (1/N) Σ_j e^{i q z_j}` summed over the actual positions.
pub fn diffraction(ensemble: &AtomEnsemble, q: f64) -> C64 {
    let sum: C64 = ensemble
        .positions
        .iter()
        .map(|z| C64::from_polar(1.0, q * z))
        .sum();
    sum / ensemble.len() as f64
}

/// Closed form of [`diffraction`] for the uniform lattice:
/// `e^{iqL/2} sin(qL/2) / (N sin(qL/2N))`.
pub fn dirichlet(count: usize, length: f64, q: f64) -> C64 {
    let n = count as f64;
    let a = 0.5 * q * length / n;
    // Near a = rπ both sines vanish; factor out the sign of each.
    let r = (a / std::f64::consts::PI).round();
    let eps = a - r * std::f64::consts::PI;
    let ratio = if eps == 0.0 {
        1.0
    } else {
        (n * eps).sin() / (n * eps.sin())
    };
    let sign = if (r as i64 * (count as i64 - 1)).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    C64::from_polar(sign * ratio, 0.5 * q * length)
}

/// Continuum limit `e^{iqL/2} sinc(qL/2)`.
pub fn continuum(length: f64, q: f64) -> C64 {
    let x = 0.5 * q * length;
    C64::from_polar(sinc(x), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const L: f64 = 0.15;

    #[test]
    fn zero_wave_vector_is_unity() {
        let e = AtomEnsemble::random(100, L, 3).unwrap();
        assert!((diffraction(&e, 0.0) - 1.0).norm() < 1e-14);
        assert!((dirichlet(100, L, 0.0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn lattice_nulls_at_integer_mismatch() {
        let e = AtomEnsemble::uniform(64, L).unwrap();
        for m in [1, 2, 7, 63, 65] {
            let q = 2.0 * PI * m as f64 / L;
            assert!(diffraction(&e, q).norm() <= 1e-12, "m = {m}");
        }
        // Aliased back to unity when m is a multiple of N.
        let q = 2.0 * PI * 64.0 / L;
        assert!((diffraction(&e, q).norm() - 1.0).abs() < 1e-12);
        assert!((dirichlet(64, L, q).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_positions_are_sorted_inside_and_reproducible() {
        let a = AtomEnsemble::random(500, L, 42).unwrap();
        let b = AtomEnsemble::random(500, L, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed(), Some(42));
        assert!(a.positions().windows(2).all(|w| w[0] <= w[1]));
        assert!(a.positions().iter().all(|z| (0.0..=L).contains(z)));
        assert_ne!(a, AtomEnsemble::random(500, L, 43).unwrap());
    }

    #[test]
    fn random_phasor_sum_is_small() {
        let q = 20.0 * PI / L;
        let worst = (0..100)
            .map(|seed| diffraction(&AtomEnsemble::random(10_000, L, seed).unwrap(), q).norm())
            .fold(0.0, f64::max);
        assert!(worst < 5e-2, "{worst}");
    }

    #[test]
    fn empty_or_degenerate_inputs_are_rejected() {
        assert!(AtomEnsemble::uniform(0, L).is_err());
        assert!(AtomEnsemble::uniform(4, 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn dirichlet_matches_direct_sum(x in -400.0f64..400.0, n in 1usize..300) {
            let q = x / L;
            let e = AtomEnsemble::uniform(n, L).unwrap();
            let d = (diffraction(&e, q) - dirichlet(n, L, q)).norm();
            proptest::prop_assert!(d < 1e-12, "{}", d);
            proptest::prop_assert!(diffraction(&e, q).norm() <= 1.0 + 1e-12);
        }
    }
}
