use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::AtomEnsemble;
use crate::dynamics::{
    EnergyLedger, Rk4, ScenarioConfig, SpinWaveState, Stage, Trajectory,
};
use crate::error::{MemoryError, Result};
use crate::model::{
    build_mode_grid, derive_params, IndexSchedule, MemoryParams, ModeGrid, Pulse,
    DEFAULT_MAX_MODES,
};
use crate::numeric;

/// Largest allowed `max_j(|P_j|² + |S_j|²)`.
pub const WEAK_FIELD_THRESHOLD: f64 = 0.1;
pub const DEFAULT_ORACLE_ATOMS: usize = 512;
const STEP_FACTOR: f64 = 0.05;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `0.05 / |Δ|`: the optical coherences rotate at `Δ`.
pub fn oracle_step_limit(params: &MemoryParams) -> f64 {
    STEP_FACTOR / params.detuning.abs()
}

/// Substeps per recorded sample so that the oracle step respects
/// [`oracle_step_limit`] while recording on a grid of spacing `record_dt`.
pub fn oracle_substeps(params: &MemoryParams, record_dt: f64) -> usize {
    (record_dt / oracle_step_limit(params) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Oracle run: the usual trajectory (sampled every `record_stride` internal
/// steps) plus diagnostics that only make sense for discrete atoms.
#[derive(Debug, Clone)]
pub struct FullTrajectory {
    pub trajectory: Trajectory,
    pub atoms: usize,
    pub internal_dt: f64,
    pub record_stride: usize,
    /// Largest `|P_j|² + |S_j|²` seen at any recorded sample.
    pub max_weak_field: f64,
    /// Largest `|μ_q L/2|` of a retained mode over the run; sets how well the
    /// lattice must approximate the continuum.
    pub max_mismatch_phase: f64,
}

struct Model<'a> {
    n: usize,
    z: Vec<f64>,
    schedule: &'a IndexSchedule,
    k_ref: f64,
    two_pi_over_lambda: f64,
    k_anchor: f64,
    half_length: f64,
    compensate: bool,
    g: f64,
    omega: f64,
    optical: C64,
    spin: C64,
    kappa: f64,
    root_two_kappa: f64,
    cavity_shift: f64,
}

impl Model<'_> {
    fn control_k(&self, t: f64, right: bool) -> f64 {
        self.schedule.control_k_one_sided(t, right)
    }

    fn exact_phases(&self, t: f64, right: bool, out: &mut [C64]) {
        let dk = self.control_k(t, right) - self.k_ref;
        for (p, z) in out.iter_mut().zip(&self.z) {
            *p = C64::from_polar(1.0, dk * z);
        }
    }

    fn rabi(&self, t: f64, right: bool) -> C64 {
        if self.compensate {
            let shift = (self.control_k(t, right) - self.k_anchor) * self.half_length;
            C64::from_polar(self.omega, -shift)
        } else {
            C64::new(self.omega, 0.0)
        }
    }

    /// State `[E, P̃_0 … P̃_{N−1}, S_0 … S_{N−1}]` with `P̃_j = P_j e^{−ikz_j}`.
    fn derivative(&self, y: &[C64], phases: &[C64], rabi: C64, e_in: C64, dy: &mut [C64]) {
        let n = self.n;
        let e = y[0];
        let drive = I * self.g * e;
        let (irabi, irabi_c) = (I * rabi, I * rabi.conj());
        let mut polar = ZERO;
        let (p, s) = y[1..].split_at(n);
        let (dp, ds) = dy[1..].split_at_mut(n);
        for j in 0..n {
            let ph = phases[j];
            dp[j] = -self.optical * p[j] + irabi * s[j] * ph + drive;
            ds[j] = -self.spin * s[j] + irabi_c * p[j] * ph.conj();
            polar += p[j];
        }
        dy[0] = -self.kappa * e + I * self.g * polar + self.root_two_kappa * e_in
            - I * self.cavity_shift * e;
    }
}

struct Recorder {
    times: Vec<f64>,
    input: Vec<C64>,
    cavity: Vec<C64>,
    output: Vec<C64>,
    spin_norm: Vec<f64>,
    loss_rate: Vec<f64>,
    max_weak_field: f64,
}

impl Recorder {
    fn push(&mut self, model: &Model<'_>, t: f64, e_in: C64, y: &[C64], gamma_p: f64, gamma_s: f64) {
        let n = model.n;
        let (p, s) = y[1..].split_at(n);
        let mut spin = 0.0;
        let mut optical = 0.0;
        let mut worst = 0.0f64;
        for j in 0..n {
            let (a, b) = (p[j].norm_sqr(), s[j].norm_sqr());
            optical += a;
            spin += b;
            worst = worst.max(a + b);
        }
        self.max_weak_field = self.max_weak_field.max(worst);
        self.times.push(t);
        self.input.push(e_in);
        self.cavity.push(y[0]);
        self.output.push(model.root_two_kappa * y[0] - e_in);
        self.spin_norm.push(spin);
        self.loss_rate.push(2.0 * gamma_p * optical + 2.0 * gamma_s * spin);
    }
}

struct Phase<'p> {
    t0: f64,
    records: usize,
    input: &'p dyn Fn(f64) -> C64,
}

/// Integrate the three-level equations for every atom, with the optical
/// coherences kept explicitly.
///
/// The two-photon light shift is cancelled with `Δ_S = +|Ω|²/Δ` and the
/// dispersive cavity pull `g²N/Δ` is removed from the cavity equation, so that
/// in the Raman limit the projections `S_q = N^{−1/2} Σ_j S_j e^{−iqz_j}`
/// obey the collective equations with `φ` in place of the continuum sinc.
/// The coupling `g` is rescaled so that `g√N_atoms` equals `params`'s `g√N`.
pub fn integrate_full(
    params: &MemoryParams,
    ensemble: &AtomEnsemble,
    schedule: &IndexSchedule,
    pulse: &Pulse,
    scenario: &ScenarioConfig,
    dt: f64,
    record_stride: usize,
) -> Result<FullTrajectory> {
    params.validate()?;
    scenario.check_schedule(schedule)?;
    if ((ensemble.length() - params.length) / params.length).abs() > 1e-12 {
        return Err(MemoryError::Config(format!(
            "ensemble length {} differs from medium length {}",
            ensemble.length(),
            params.length
        )));
    }
    let limit = oracle_step_limit(params);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(MemoryError::StepSize { dt, limit });
    }
    if record_stride == 0 {
        return Err(MemoryError::invalid("record_stride", "must be at least 1"));
    }
    let record_dt = dt * record_stride as f64;
    let storage_records =
        ((scenario.storage_duration() / record_dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let rdt = scenario.storage_duration() / storage_records as f64;
    let retrieval_records = (scenario.retrieval_duration() / rdt).round() as usize;
    if retrieval_records == 0
        || (retrieval_records as f64 * rdt - scenario.retrieval_duration()).abs()
            > 1e-9 * scenario.retrieval_duration()
    {
        return Err(MemoryError::GridMismatch(format!(
            "retrieval window {} is not a whole number of samples {rdt}",
            scenario.retrieval_duration()
        )));
    }
    let h = rdt / record_stride as f64;

    let derived = derive_params(params, schedule.storage_slope())?;
    let modes = build_mode_grid(
        schedule,
        &derived,
        (scenario.start, scenario.end),
        5.0 * pulse.fwhm,
        DEFAULT_MAX_MODES,
    )?;

    let n = ensemble.len();
    let model = Model {
        n,
        z: ensemble.positions().to_vec(),
        schedule,
        k_ref: schedule.reference_k(),
        two_pi_over_lambda: 2.0 * PI / schedule.control_wavelength(),
        k_anchor: schedule.control_k_one_sided(schedule.anchor(), false),
        half_length: 0.5 * params.length,
        compensate: scenario.phase_compensation,
        g: params.collective_g() / (n as f64).sqrt(),
        omega: params.rabi_omega,
        optical: C64::new(params.gamma_p, params.detuning),
        spin: C64::new(
            params.gamma_s,
            params.rabi_omega * params.rabi_omega / params.detuning,
        ),
        kappa: params.kappa,
        root_two_kappa: (2.0 * params.kappa).sqrt(),
        cavity_shift: params.collective_g().powi(2) / params.detuning,
    };

    let total = storage_records + retrieval_records + 1;
    let mut rec = Recorder {
        times: Vec::with_capacity(total),
        input: Vec::with_capacity(total),
        cavity: Vec::with_capacity(total),
        output: Vec::with_capacity(total),
        spin_norm: Vec::with_capacity(total),
        loss_rate: Vec::with_capacity(total),
        max_weak_field: 0.0,
    };
    let mut y = vec![ZERO; 1 + 2 * n];
    let mut rk = Rk4::new(y.len());
    let mut ph_start = vec![ZERO; n];
    let mut ph_mid = vec![ZERO; n];
    let mut ph_end = vec![ZERO; n];
    let mut rotor = vec![ZERO; n];
    let mut rotor_rate = f64::NAN;

    let flip = scenario.flip;
    let storage_input = |t: f64| if t <= flip { pulse.eval(t) } else { ZERO };
    let no_input = |_: f64| ZERO;
    let phases = [
        Phase {
            t0: scenario.start,
            records: storage_records,
            input: &storage_input,
        },
        Phase {
            t0: flip,
            records: retrieval_records,
            input: &no_input,
        },
    ];
    let mut spin_at_flip = None;
    for (k, phase) in phases.iter().enumerate() {
        if k == 0 {
            rec.push(&model, phase.t0, (phase.input)(phase.t0), &y, params.gamma_p, params.gamma_s);
        }
        let steps = phase.records * record_stride;
        for i in 0..steps {
            let t = phase.t0 + i as f64 * h;
            let t_end = phase.t0 + (i + 1) as f64 * h;
            let t_mid = 0.5 * (t + t_end);
            let rate = model.two_pi_over_lambda * schedule.slope_one_sided(t, true);
            let rate_end = model.two_pi_over_lambda * schedule.slope_one_sided(t_end, false);
            let jump = model.control_k(t, true) != model.control_k(t, false);
            if i % record_stride == 0 || jump {
                model.exact_phases(t, true, &mut ph_start);
            }
            if rate == rate_end {
                if rate != rotor_rate {
                    for (r, z) in rotor.iter_mut().zip(&model.z) {
                        *r = C64::from_polar(1.0, 0.5 * rate * h * z);
                    }
                    rotor_rate = rate;
                }
                for j in 0..n {
                    ph_mid[j] = ph_start[j] * rotor[j];
                    ph_end[j] = ph_mid[j] * rotor[j];
                }
            } else {
                model.exact_phases(t_mid, true, &mut ph_mid);
                model.exact_phases(t_end, false, &mut ph_end);
            }
            let rabi = [model.rabi(t, true), model.rabi(t_mid, true), model.rabi(t_end, false)];
            let drive = [(phase.input)(t), (phase.input)(t_mid), (phase.input)(t_end)];
            rk.step(h, &mut y, |stage, y, dy| match stage {
                Stage::Start => model.derivative(y, &ph_start, rabi[0], drive[0], dy),
                Stage::Mid => model.derivative(y, &ph_mid, rabi[1], drive[1], dy),
                Stage::End => model.derivative(y, &ph_end, rabi[2], drive[2], dy),
            });
            std::mem::swap(&mut ph_start, &mut ph_end);
            if (i + 1) % record_stride == 0 {
                rec.push(&model, t_end, (phase.input)(t_end), &y, params.gamma_p, params.gamma_s);
                if rec.max_weak_field > WEAK_FIELD_THRESHOLD {
                    return Err(MemoryError::WeakField {
                        value: rec.max_weak_field,
                        threshold: WEAK_FIELD_THRESHOLD,
                    });
                }
            }
        }
        if k == 0 {
            spin_at_flip = Some(project(&model, &modes, &y, flip));
        }
    }
    let spin_at_flip = spin_at_flip.expect("storage phase always runs");
    let spin_final = project(&model, &modes, &y, scenario.end);

    let flip_index = storage_records;
    let optical_final: f64 = y[1..=n].iter().map(|p| p.norm_sqr()).sum();
    let spin_final_norm: f64 = y[1 + n..].iter().map(|s| s.norm_sqr()).sum();
    let decayed = trapezoid(&rec.loss_rate, rdt);
    let input_energy = numeric::energy(&rec.input[..=flip_index], rdt);
    let ledger = EnergyLedger {
        input: input_energy,
        reflected: numeric::energy(&rec.output[..=flip_index], rdt),
        retrieved: numeric::energy(&rec.output[flip_index..], rdt),
        stored_final: spin_final_norm + optical_final,
        cavity_final: y[0].norm_sqr(),
        decayed,
    };
    let max_mismatch_phase = max_mismatch_phase(schedule, &modes, params.length);
    Ok(FullTrajectory {
        trajectory: Trajectory {
            times: rec.times,
            dt: rdt,
            flip_index,
            kappa: params.kappa,
            input: rec.input,
            cavity: rec.cavity,
            output: rec.output,
            spin_norm: rec.spin_norm,
            spin_at_flip,
            spin_final,
            spin_history: None,
            ledger,
        },
        atoms: n,
        internal_dt: h,
        record_stride,
        max_weak_field: rec.max_weak_field,
        max_mismatch_phase,
    })
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

fn project(model: &Model<'_>, modes: &ModeGrid, y: &[C64], time: f64) -> SpinWaveState {
    let n = model.n;
    let norm = 1.0 / (n as f64).sqrt();
    let spins = &y[1 + n..];
    let amplitudes = modes
        .q
        .iter()
        .map(|q| {
            spins
                .iter()
                .zip(&model.z)
                .map(|(s, z)| s * C64::from_polar(1.0, -q * z))
                .sum::<C64>()
                * norm
        })
        .collect();
    SpinWaveState {
        time,
        modes: modes.clone(),
        amplitudes,
        cavity: y[0],
    }
}

fn max_mismatch_phase(schedule: &IndexSchedule, modes: &ModeGrid, length: f64) -> f64 {
    let (lo, hi) = schedule
        .segments()
        .iter()
        .flat_map(|s| [s.n_start, s.n_end()])
        .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let k = |n: f64| 2.0 * PI * n / schedule.control_wavelength() - schedule.reference_k();
    modes
        .q
        .iter()
        .flat_map(|q| [q + k(lo), q + k(hi)])
        .map(|mu| (0.5 * mu * length).abs())
        .fold(0.0, f64::max)
}
