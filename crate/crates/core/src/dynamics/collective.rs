use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::rk4::{Rk4, Stage};
use super::trajectory::{EnergyLedger, FieldRecord, SpinHistory, SpinWaveState, Trajectory};
use super::ScenarioConfig;
use crate::error::{MemoryError, Result};
use crate::model::{DerivedParams, IndexSchedule, MemoryParams, ModeGrid, Pulse};
use crate::numeric::sinc;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest admissible step: `min(δ, τ_p, 1/κ, 1/Γ) / 50`.
pub fn step_limit(derived: &DerivedParams, pulse_fwhm: f64) -> f64 {
    let mut scale = derived.delta.min(pulse_fwhm).min(1.0 / derived.kappa);
    if derived.gamma > 0.0 {
        scale = scale.min(1.0 / derived.gamma);
    }
    scale / 50.0
}

/// Right-hand side of the collective equations for a fixed mode set.
///
/// `dS_q/dt = −γ' S_q + i G c_q(t) E`
/// `dE/dt  = −κ E + √(2κ) E_in + i G* Σ_q c_q(t)* S_q`
///
/// with `c_q = e^{−iθ_q} sinc(μ_q L/2)` when the control phase is
/// compensated (θ_q is the mismatch phase at the anchor) and
/// `c_q = e^{−iμ_q L/2} sinc(μ_q L/2)` otherwise.
#[derive(Debug, Clone)]
pub struct CollectiveSystem<'a> {
    schedule: &'a IndexSchedule,
    kappa: f64,
    root_two_kappa: f64,
    gamma_prime: f64,
    coupling: C64,
    half_length: f64,
    q_minus_k: Vec<f64>,
    compensation: Option<Vec<C64>>,
}

impl<'a> CollectiveSystem<'a> {
    pub fn new(
        params: &MemoryParams,
        derived: &DerivedParams,
        schedule: &'a IndexSchedule,
        modes: &ModeGrid,
        phase_compensation: bool,
    ) -> Self {
        let half_length = 0.5 * params.length;
        let k_anchor = schedule.control_k_unchecked(schedule.anchor());
        let q_minus_k: Vec<f64> = modes.q.iter().map(|q| q - schedule.reference_k()).collect();
        let compensation = phase_compensation.then(|| {
            q_minus_k
                .iter()
                .map(|qk| C64::from_polar(1.0, -(qk + k_anchor) * half_length))
                .collect()
        });
        CollectiveSystem {
            schedule,
            kappa: params.kappa,
            root_two_kappa: (2.0 * params.kappa).sqrt(),
            gamma_prime: derived.gamma_prime,
            coupling: derived.collective_coupling(),
            half_length,
            q_minus_k,
            compensation,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.q_minus_k.len()
    }

    /// Coupling weights `c_q` at `t`, taking the one-sided limit of the index
    /// (`right = true` for the start of a step).
    pub fn weights(&self, t: f64, right: bool, out: &mut [C64]) {
        let kc = self.schedule.control_k_one_sided(t, right);
        match &self.compensation {
            Some(phase) => {
                for ((w, qk), p) in out.iter_mut().zip(&self.q_minus_k).zip(phase) {
                    *w = p * sinc((qk + kc) * self.half_length);
                }
            }
            None => {
                for (w, qk) in out.iter_mut().zip(&self.q_minus_k) {
                    let x = (qk + kc) * self.half_length;
                    *w = C64::from_polar(sinc(x), -x);
                }
            }
        }
    }

    /// `dy` for state `y = [E, S_0, S_1, …]`.
    pub fn derivative(&self, y: &[C64], weights: &[C64], e_in: C64, dy: &mut [C64]) {
        let e = y[0];
        let drive = I * self.coupling * e;
        let mut back = ZERO;
        for ((d, s), w) in dy[1..].iter_mut().zip(&y[1..]).zip(weights) {
            back += w.conj() * s;
            *d = -self.gamma_prime * s + drive * w;
        }
        dy[0] = -self.kappa * e + self.root_two_kappa * e_in + I * self.coupling.conj() * back;
    }

    pub fn output(&self, cavity: C64, e_in: C64) -> C64 {
        self.root_two_kappa * cavity - e_in
    }
}

struct Segment {
    times: Vec<f64>,
    input: Vec<C64>,
    cavity: Vec<C64>,
    output: Vec<C64>,
    spin_norm: Vec<f64>,
    history: Option<SpinHistory>,
    last: Vec<C64>,
}

/// Integrate `y` over `steps` steps of `dt` from `t0`, driving with
/// `input(t)`, and record every sample (including the initial one).
fn propagate<F: Fn(f64) -> C64>(
    system: &CollectiveSystem<'_>,
    t0: f64,
    dt: f64,
    steps: usize,
    mut y: Vec<C64>,
    input: F,
    stride: Option<usize>,
    index_offset: usize,
) -> Segment {
    let m = system.mode_count();
    let mut rk = Rk4::new(m + 1);
    let mut w_start = vec![ZERO; m];
    let mut w_mid = vec![ZERO; m];
    let mut w_end = vec![ZERO; m];
    let mut seg = Segment {
        times: Vec::with_capacity(steps + 1),
        input: Vec::with_capacity(steps + 1),
        cavity: Vec::with_capacity(steps + 1),
        output: Vec::with_capacity(steps + 1),
        spin_norm: Vec::with_capacity(steps + 1),
        history: stride.map(|stride| SpinHistory {
            stride,
            times: Vec::new(),
            amplitudes: Vec::new(),
        }),
        last: Vec::new(),
    };
    let record = |seg: &mut Segment, i: usize, t: f64, y: &[C64]| {
        let e_in = input(t);
        seg.times.push(t);
        seg.input.push(e_in);
        seg.cavity.push(y[0]);
        seg.output.push(system.output(y[0], e_in));
        seg.spin_norm.push(y[1..].iter().map(|s| s.norm_sqr()).sum());
        if let Some(h) = seg.history.as_mut() {
            if (i + index_offset) % h.stride == 0 {
                h.times.push(t);
                h.amplitudes.push(y[1..].to_vec());
            }
        }
    };
    record(&mut seg, 0, t0, &y);
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        let t_end = t0 + (i + 1) as f64 * dt;
        let t_mid = 0.5 * (t + t_end);
        system.weights(t, true, &mut w_start);
        system.weights(t_mid, true, &mut w_mid);
        system.weights(t_end, false, &mut w_end);
        let (in_start, in_mid, in_end) = (input(t), input(t_mid), input(t_end));
        rk.step(dt, &mut y, |stage, y, dy| match stage {
            Stage::Start => system.derivative(y, &w_start, in_start, dy),
            Stage::Mid => system.derivative(y, &w_mid, in_mid, dy),
            Stage::End => system.derivative(y, &w_end, in_end, dy),
        });
        record(&mut seg, i + 1, t_end, &y);
    }
    seg.last = y;
    seg
}

fn step_count(duration: f64, dt: f64) -> usize {
    // Tolerate dt that divides the window up to rounding.
    ((duration / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

struct Checked {
    steps_storage: usize,
    steps_retrieval: usize,
    dt: f64,
}

fn check_inputs(
    params: &MemoryParams,
    derived: &DerivedParams,
    schedule: &IndexSchedule,
    modes: &ModeGrid,
    pulse_fwhm: f64,
    scenario: &ScenarioConfig,
    dt: f64,
) -> Result<Checked> {
    params.validate()?;
    scenario.check_schedule(schedule)?;
    let limit = step_limit(derived, pulse_fwhm);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(MemoryError::StepSize { dt, limit });
    }
    let expected_dq = 2.0 * PI / params.length;
    if ((modes.q_spacing - expected_dq) / expected_dq).abs() > 1e-9 {
        return Err(MemoryError::Config(format!(
            "mode spacing {} does not match 2π/L = {}; derived parameters and schedule disagree",
            modes.q_spacing, expected_dq
        )));
    }
    if !modes.covers(scenario.start, scenario.end) {
        return Err(MemoryError::ModeCoverage {
            grid_start: modes.first_time(),
            grid_end: modes.last_time(),
            need_start: scenario.start,
            need_end: scenario.end,
        });
    }
    let steps_storage = step_count(scenario.storage_duration(), dt);
    let dt_eff = scenario.storage_duration() / steps_storage as f64;
    let steps_retrieval = (scenario.retrieval_duration() / dt_eff).round() as usize;
    let mismatch = (steps_retrieval as f64 * dt_eff - scenario.retrieval_duration()).abs();
    if steps_retrieval == 0 || mismatch > 1e-9 * scenario.retrieval_duration() {
        return Err(MemoryError::GridMismatch(format!(
            "retrieval window {} is not a whole number of steps {}",
            scenario.retrieval_duration(),
            dt_eff
        )));
    }
    Ok(Checked {
        steps_storage,
        steps_retrieval,
        dt: dt_eff,
    })
}

/// Result of the storage half of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageResult {
    pub state: SpinWaveState,
    pub input: FieldRecord,
    pub reflected: FieldRecord,
    pub cavity: Vec<C64>,
    pub spin_norm: Vec<f64>,
    pub history: Option<SpinHistory>,
}

#[allow(clippy::too_many_arguments)]
fn storage_phase(
    params: &MemoryParams,
    derived: &DerivedParams,
    schedule: &IndexSchedule,
    modes: &ModeGrid,
    pulse: &Pulse,
    scenario: &ScenarioConfig,
    steps: usize,
    dt: f64,
) -> StorageResult {
    let system = CollectiveSystem::new(params, derived, schedule, modes, scenario.phase_compensation);
    let y0 = vec![ZERO; modes.len() + 1];
    let flip = scenario.flip;
    let seg = propagate(
        &system,
        scenario.start,
        dt,
        steps,
        y0,
        |t| if t <= flip { pulse.eval(t) } else { ZERO },
        scenario.spin_record_stride,
        0,
    );
    StorageResult {
        state: SpinWaveState {
            time: scenario.flip,
            modes: modes.clone(),
            amplitudes: seg.last[1..].to_vec(),
            cavity: seg.last[0],
        },
        input: FieldRecord::new(scenario.start, dt, seg.input),
        reflected: FieldRecord::new(scenario.start, dt, seg.output),
        cavity: seg.cavity,
        spin_norm: seg.spin_norm,
        history: seg.history,
    }
}

/// Storage half only: integrate over `[start, flip]` from `S_q = 0`.
pub fn run_storage(
    params: &MemoryParams,
    derived: &DerivedParams,
    schedule: &IndexSchedule,
    modes: &ModeGrid,
    pulse: &Pulse,
    scenario: &ScenarioConfig,
    dt: f64,
) -> Result<StorageResult> {
    let c = check_inputs(params, derived, schedule, modes, pulse.fwhm, scenario, dt)?;
    Ok(storage_phase(
        params,
        derived,
        schedule,
        modes,
        pulse,
        scenario,
        c.steps_storage,
        c.dt,
    ))
}

struct RetrievalResult {
    output: FieldRecord,
    cavity: Vec<C64>,
    spin_norm: Vec<f64>,
    history: Option<SpinHistory>,
    last: SpinWaveState,
}

#[allow(clippy::too_many_arguments)]
fn retrieval_phase(
    state: &SpinWaveState,
    params: &MemoryParams,
    derived: &DerivedParams,
    schedule: &IndexSchedule,
    scenario: &ScenarioConfig,
    steps: usize,
    dt: f64,
    index_offset: usize,
) -> RetrievalResult {
    let system = CollectiveSystem::new(
        params,
        derived,
        schedule,
        &state.modes,
        scenario.phase_compensation,
    );
    let mut y0 = Vec::with_capacity(state.amplitudes.len() + 1);
    y0.push(state.cavity);
    y0.extend_from_slice(&state.amplitudes);
    let seg = propagate(
        &system,
        scenario.flip,
        dt,
        steps,
        y0,
        |_| ZERO,
        scenario.spin_record_stride,
        index_offset,
    );
    RetrievalResult {
        output: FieldRecord::new(scenario.flip, dt, seg.output),
        cavity: seg.cavity,
        spin_norm: seg.spin_norm,
        history: seg.history,
        last: SpinWaveState {
            time: scenario.end,
            modes: state.modes.clone(),
            amplitudes: seg.last[1..].to_vec(),
            cavity: seg.last[0],
        },
    }
}

/// Retrieval half: integrate `state` over `[flip, end]` with no input.
pub fn run_retrieval(
    state: &SpinWaveState,
    params: &MemoryParams,
    derived: &DerivedParams,
    schedule: &IndexSchedule,
    scenario: &ScenarioConfig,
    dt: f64,
) -> Result<FieldRecord> {
    // The pulse width only enters the step limit; retrieval has no pulse.
    let c = check_inputs(
        params,
        derived,
        schedule,
        &state.modes,
        f64::INFINITY,
        scenario,
        dt,
    )?;
    if (state.time - scenario.flip).abs() > 1e-9 * scenario.retrieval_duration() {
        return Err(MemoryError::GridMismatch(format!(
            "state recorded at {} but retrieval starts at {}",
            state.time, scenario.flip
        )));
    }
    Ok(retrieval_phase(state, params, derived, schedule, scenario, c.steps_retrieval, c.dt, 0).output)
}

/// Full storage-then-retrieval run on a uniform grid with step at most `dt`.
pub fn integrate(
    params: &MemoryParams,
    derived: &DerivedParams,
    schedule: &IndexSchedule,
    modes: &ModeGrid,
    pulse: &Pulse,
    scenario: &ScenarioConfig,
    dt: f64,
) -> Result<Trajectory> {
    let c = check_inputs(params, derived, schedule, modes, pulse.fwhm, scenario, dt)?;
    let storage = storage_phase(
        params,
        derived,
        schedule,
        modes,
        pulse,
        scenario,
        c.steps_storage,
        c.dt,
    );
    let retrieval = retrieval_phase(
        &storage.state,
        params,
        derived,
        schedule,
        scenario,
        c.steps_retrieval,
        c.dt,
        c.steps_storage,
    );

    let flip_index = c.steps_storage;
    let mut times = storage.input.times();
    times.extend(retrieval.output.times().into_iter().skip(1));
    let mut input = storage.input.samples.clone();
    input.extend(std::iter::repeat(ZERO).take(c.steps_retrieval));
    let mut cavity = storage.cavity;
    cavity.extend_from_slice(&retrieval.cavity[1..]);
    let mut output = storage.reflected.samples.clone();
    output.extend_from_slice(&retrieval.output.samples[1..]);
    let mut spin_norm = storage.spin_norm;
    spin_norm.extend_from_slice(&retrieval.spin_norm[1..]);
    let spin_history = match (storage.history, retrieval.history) {
        (Some(mut a), Some(b)) => {
            // The flip sample is already in the storage record.
            for (t, amps) in b.times.into_iter().zip(b.amplitudes) {
                if t > scenario.flip {
                    a.times.push(t);
                    a.amplitudes.push(amps);
                }
            }
            Some(a)
        }
        _ => None,
    };

    let decayed = 2.0 * derived.gamma_prime * {
        let n = spin_norm.len();
        c.dt * (spin_norm[1..n - 1].iter().sum::<f64>() + 0.5 * (spin_norm[0] + spin_norm[n - 1]))
    };
    let ledger = EnergyLedger {
        input: storage.input.energy(),
        reflected: storage.reflected.energy(),
        retrieved: retrieval.output.energy(),
        stored_final: retrieval.last.norm_sqr(),
        cavity_final: retrieval.last.cavity.norm_sqr(),
        decayed,
    };
    Ok(Trajectory {
        times,
        dt: c.dt,
        flip_index,
        kappa: params.kappa,
        input,
        cavity,
        output,
        spin_norm,
        spin_at_flip: storage.state,
        spin_final: retrieval.last,
        spin_history,
        ledger,
    })
}

