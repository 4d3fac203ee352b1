//! Small numerical helpers shared by the simulators and the closed forms.

use num_complex::Complex64 as C64;

use crate::error::{MemoryError, Result};

const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Unnormalized sinc, `sin(x)/x`, with a Taylor branch near the origin.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Trapezoid-rule energy `∫|f|² dt` of uniformly sampled data.
pub fn energy(samples: &[C64], dt: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let interior: f64 = samples[1..n - 1].iter().map(|z| z.norm_sqr()).sum();
            dt * (interior + 0.5 * (samples[0].norm_sqr() + samples[n - 1].norm_sqr()))
        }
    }
}

/// Relative L2 distance `‖a − b‖ / ‖b‖`.
pub fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "relative_l2 needs equal lengths");
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

/// Relative L2 distance after removing the best global phase of `a`
/// relative to `b`.
pub fn relative_l2_up_to_phase(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "relative_l2_up_to_phase needs equal lengths");
    let overlap: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let rotated: Vec<C64> = a.iter().map(|x| x * phase).collect();
    relative_l2(&rotated, b)
}

/// Pearson correlation coefficient of two real series.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pearson needs equal lengths");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Full width at half maximum of a sampled, single-peaked intensity profile,
/// with linear interpolation at both half-maximum crossings.
pub fn intensity_fwhm(times: &[f64], intensity: &[f64]) -> Option<f64> {
    let (ipk, &peak) = intensity
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if peak <= 0.0 {
        return None;
    }
    let half = 0.5 * peak;
    let crossing = |i0: usize, i1: usize| {
        let (y0, y1) = (intensity[i0], intensity[i1]);
        times[i0] + (half - y0) / (y1 - y0) * (times[i1] - times[i0])
    };
    let left = (1..=ipk).rev().find(|&i| intensity[i - 1] < half)?;
    let right = (ipk..intensity.len() - 1).find(|&i| intensity[i + 1] < half)?;
    Some(crossing(right, right + 1) - crossing(left - 1, left))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 48;

    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
        worst: &mut f64,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            if depth == 0 {
                *worst = worst.max(delta.abs());
            }
            return left + right + delta / 15.0;
        }
        recurse(f, (a, fa), (lm, flm), (m, fm), left, 0.5 * tol, depth - 1, worst)
            + recurse(f, (m, fm), (rm, frm), (b, fb), right, 0.5 * tol, depth - 1, worst)
    }

    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Coarse magnitude estimate sets the absolute target.
    let probe: f64 = (0..=16)
        .map(|i| f(a + (b - a) * i as f64 / 16.0).abs())
        .sum::<f64>()
        * (b - a).abs()
        / 17.0;
    let tol = (rel_tol * probe).max(f64::MIN_POSITIVE);
    let mut worst = 0.0;
    let value = recurse(&f, (a, fa), (m, fm), (b, fb), whole, tol, MAX_DEPTH, &mut worst);
    if !value.is_finite() || worst > tol {
        return Err(MemoryError::Quadrature {
            estimate: value,
            error: worst,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_series_branch_is_continuous() {
        let x = SINC_SERIES_CUTOFF;
        assert!((sinc(x * (1.0 - 1e-9)) - x.sin() / x).abs() < 1e-15);
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn simpson_matches_closed_forms() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        let v = adaptive_simpson(|x| (-x * x).exp(), -6.0, 6.0, 1e-10).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn phase_blind_distance_ignores_global_phase() {
        let b: Vec<C64> = (0..10).map(|i| C64::new(i as f64, 1.0)).collect();
        let a: Vec<C64> = b.iter().map(|z| z * C64::from_polar(1.0, 0.7)).collect();
        assert!(relative_l2_up_to_phase(&a, &b) < 1e-14);
        assert!(relative_l2(&a, &b) > 0.1);
    }

    #[test]
    fn fwhm_of_sampled_triangle() {
        let t: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|x| (1.0 - x.abs()).max(0.0)).collect();
        assert!((intensity_fwhm(&t, &y).unwrap() - 1.0).abs() < 1e-12);
    }
}
