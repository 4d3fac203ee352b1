use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::FullTrajectory;
use crate::dynamics::Trajectory;
use crate::error::{MemoryError, Result};
use crate::numeric::{relative_l2, sinc};

/// Largest tolerated gap between the lattice diffraction function and the
/// continuum sinc over the mismatch range a run visits.
pub const SINC_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    /// Relative L2 distance of the full-model output from the collective one.
    pub output_l2: f64,
    /// Relative L2 distance of the stored mode amplitudes at the flip.
    pub spin_l2: f64,
    /// `η_full − η_collective`.
    pub efficiency_difference: f64,
    /// `|S_q^full − S_q^collective|` at the flip, one entry per mode.
    pub mode_residuals: Vec<f64>,
    /// Max-norm gap between the uniform-lattice diffraction function and the
    /// continuum sinc over the visited mismatch range.
    pub sinc_error: f64,
    /// The ensemble is too small for its diffraction function to stand in
    /// for the sinc.
    pub insufficient_atoms: bool,
}

/// `max |sin x / (N sin(x/N)) − sinc x|` for `0 ≤ x ≤ x_max`.
pub fn lattice_sinc_error(atoms: usize, x_max: f64) -> f64 {
    let n = atoms as f64;
    let samples = 4000;
    (0..=samples)
        .map(|i| x_max * i as f64 / samples as f64)
        .map(|x| {
            let lattice = if x == 0.0 { 1.0 } else { x.sin() / (n * (x / n).sin()) };
            (lattice - sinc(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Bring two uniformly sampled series onto the coarser grid. Fails unless
/// they start together and one step is an integer multiple of the other.
fn common_grid<'a>(
    a: &'a Trajectory,
    b: &'a Trajectory,
) -> Result<(Vec<&'a C64>, Vec<&'a C64>)> {
    let tol = 1e-9 * a.dt.min(b.dt);
    if (a.times[0] - b.times[0]).abs() > tol {
        return Err(MemoryError::GridMismatch(format!(
            "records start at {} and {}",
            a.times[0], b.times[0]
        )));
    }
    let (fine, coarse, swapped) = if a.dt <= b.dt { (a, b, false) } else { (b, a, true) };
    let ratio = coarse.dt / fine.dt;
    let stride = ratio.round();
    if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio {
        return Err(MemoryError::GridMismatch(format!(
            "steps {} and {} are not commensurate",
            a.dt, b.dt
        )));
    }
    let stride = stride as usize;
    let fine_out: Vec<&C64> = fine.output.iter().step_by(stride).collect();
    let len = fine_out.len().min(coarse.output.len());
    if fine_out.len().abs_diff(coarse.output.len()) > 1 {
        return Err(MemoryError::GridMismatch("records cover different windows".into()));
    }
    let fine_out = fine_out[..len].to_vec();
    let coarse_out: Vec<&C64> = coarse.output[..len].iter().collect();
    Ok(if swapped {
        (coarse_out, fine_out)
    } else {
        (fine_out, coarse_out)
    })
}

/// Compare an oracle run with a collective run of the same scenario.
pub fn compare_models(full: &FullTrajectory, collective: &Trajectory) -> Result<ModelComparison> {
    let (f_out, c_out) = common_grid(&full.trajectory, collective)?;
    let f_out: Vec<C64> = f_out.into_iter().copied().collect();
    let c_out: Vec<C64> = c_out.into_iter().copied().collect();

    let f_spin = &full.trajectory.spin_at_flip;
    let c_spin = &collective.spin_at_flip;
    if f_spin.modes.q.len() != c_spin.modes.q.len()
        || f_spin
            .modes
            .q
            .iter()
            .zip(&c_spin.modes.q)
            .any(|(a, b)| (a - b).abs() > 1e-9 * f_spin.modes.q_spacing)
    {
        return Err(MemoryError::GridMismatch("the two runs use different mode grids".into()));
    }
    let mode_residuals = f_spin
        .amplitudes
        .iter()
        .zip(&c_spin.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .collect();
    let sinc_error = lattice_sinc_error(full.atoms, full.max_mismatch_phase);
    Ok(ModelComparison {
        output_l2: relative_l2(&f_out, &c_out),
        spin_l2: relative_l2(&f_spin.amplitudes, &c_spin.amplitudes),
        efficiency_difference: full.trajectory.efficiency() - collective.efficiency(),
        mode_residuals,
        sinc_error,
        insufficient_atoms: sinc_error > SINC_TOLERANCE,
    })
}
