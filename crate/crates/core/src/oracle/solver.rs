//! Strang split-step integrator for
//! `i d/dt psi = (-(1/2) d^2/dx^2 - i Gamma(x) / 2) psi` on a periodic grid.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::oracle::wavepacket::WavepacketState;

/// Maximum kinetic phase `k_max^2 dt / 2` allowed per step.
pub const STEP_BOUND: f64 = 0.1;

/// Runs abort once the field at the grid edge exceeds this modulus.
pub const BOUNDARY_LIMIT: f64 = 1e-8;

const BOUNDARY_CHECK_INTERVAL: usize = 64;

/// Largest time step allowed by `STEP_BOUND` on a grid with spacing `dx`.
pub fn max_time_step(dx: f64) -> f64 {
    let k_max = std::f64::consts::PI / dx;
    2.0 * STEP_BOUND / (k_max * k_max)
}

/// Optional observers attached to a run.
#[derive(Default)]
pub struct Hooks<'a> {
    /// Accumulate `integral psi(x, t) e^{i E t} dt` at this energy.
    pub stationary_energy: Option<f64>,
    /// Called with the physical state every `stride` steps (and at step 0).
    pub snapshot: Option<(usize, &'a mut dyn FnMut(&WavepacketState))>,
}

pub struct Evolution {
    pub state: WavepacketState,
    /// Time-integrated field at the requested energy, one value per grid
    /// point. For a packet that starts and ends far from a point `x`, the
    /// ratio of two entries is the stationary propagation amplitude.
    pub stationary: Option<Vec<Complex64>>,
    pub steps: usize,
}

struct Stepper {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    half_kinetic: Vec<Complex64>,
    full_kinetic: Vec<Complex64>,
    decay: Vec<f64>,
}

impl Stepper {
    fn new(state: &WavepacketState, dt: f64) -> Self {
        let n = state.grid.len();
        let mut planner = FftPlanner::new();
        let scale = 1.0 / n as f64;
        let q = state.grid.wavenumbers();
        let kinetic = |tau: f64| -> Vec<Complex64> {
            q.iter()
                .map(|&q| Complex64::from_polar(scale, -0.5 * q * q * tau))
                .collect()
        };
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            half_kinetic: kinetic(0.5 * dt),
            full_kinetic: kinetic(dt),
            decay: state
                .gamma_ratio
                .iter()
                .map(|g| (-0.5 * state.decay_rate * g * dt).exp())
                .collect(),
        }
    }

    fn kinetic(&self, psi: &mut [Complex64], half: bool) {
        self.forward.process(psi);
        let factors = if half {
            &self.half_kinetic
        } else {
            &self.full_kinetic
        };
        psi.iter_mut().zip(factors).for_each(|(z, f)| *z *= f);
        self.inverse.process(psi);
    }

    fn decay(&self, psi: &mut [Complex64]) {
        psi.iter_mut().zip(&self.decay).for_each(|(z, d)| *z *= d);
    }
}

fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("time step must be > 0, got {dt}")));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::Config(format!("duration must be >= 0, got {duration}")));
    }
    let steps = (duration / dt).round();
    if (steps * dt - duration).abs() > 1e-9 * duration.max(dt) {
        return Err(Error::Config(format!(
            "duration {duration} is not an integer number of steps of {dt}"
        )));
    }
    Ok(steps as usize)
}

fn check_boundary(psi: &[Complex64], time: f64) -> Result<()> {
    let amplitude = psi[0].norm().max(psi[psi.len() - 1].norm());
    if amplitude > BOUNDARY_LIMIT {
        return Err(Error::BoundaryContamination {
            amplitude,
            limit: BOUNDARY_LIMIT,
            time,
        });
    }
    Ok(())
}

/// Evolves `state` for `duration` in steps of `dt`.
pub fn propagate(state: &WavepacketState, duration: f64, dt: f64) -> Result<WavepacketState> {
    evolve(state, duration, dt, Hooks::default()).map(|e| e.state)
}

/// Same as [`propagate`], with observers.
///
/// Consecutive kinetic half steps are merged, so between steps the field is
/// held half a kinetic step behind the physical state. Observers that need
/// the physical field pay one extra transform pair; the stationary
/// accumulator instead sums the lagged fields and applies the half step once.
pub fn evolve(
    state: &WavepacketState,
    duration: f64,
    dt: f64,
    mut hooks: Hooks<'_>,
) -> Result<Evolution> {
    let steps = step_count(duration, dt)?;
    let k_max = state.grid.k_max();
    let phase_per_step = 0.5 * k_max * k_max * dt;
    if phase_per_step >= STEP_BOUND {
        return Err(Error::Config(format!(
            "time step {dt} gives {phase_per_step:.4} rad of kinetic phase at the Nyquist mode; \
             the bound is {STEP_BOUND}"
        )));
    }
    let n = state.grid.len();
    if !n.is_power_of_two() {
        return Err(Error::Config(format!("grid length {n} is not a power of two")));
    }
    check_boundary(&state.values, state.time)?;

    let stepper = Stepper::new(state, dt);
    let t0 = state.time;
    let mut psi = state.values.clone();

    let energy = hooks.stationary_energy;
    // Trapezoid weights: the endpoints carry dt/2.
    let mut acc_physical = energy.map(|_| vec![Complex64::new(0.0, 0.0); n]);
    let mut acc_lagged = energy.map(|_| vec![Complex64::new(0.0, 0.0); n]);
    if let (Some(e), Some(acc)) = (energy, acc_physical.as_mut()) {
        let w = Complex64::from_polar(0.5 * dt, e * t0);
        acc.iter_mut().zip(&psi).for_each(|(a, z)| *a += w * z);
    }
    if let Some((_, f)) = hooks.snapshot.as_mut() {
        f(state);
    }

    if steps > 0 {
        stepper.kinetic(&mut psi, true);
    }
    for step in 1..=steps {
        let t = t0 + step as f64 * dt;
        stepper.decay(&mut psi);
        if let (Some(e), Some(acc)) = (energy, acc_lagged.as_mut()) {
            let weight = if step == steps { 0.5 * dt } else { dt };
            let w = Complex64::from_polar(weight, e * t);
            acc.iter_mut().zip(&psi).for_each(|(a, z)| *a += w * z);
        }
        if step % BOUNDARY_CHECK_INTERVAL == 0 {
            check_boundary(&psi, t)?;
        }
        if let Some((stride, f)) = hooks.snapshot.as_mut() {
            if step % (*stride).max(1) == 0 && step != steps {
                let mut snap = state.clone();
                snap.values.copy_from_slice(&psi);
                stepper.kinetic(&mut snap.values, true);
                snap.time = t;
                f(&snap);
            }
        }
        stepper.kinetic(&mut psi, step == steps);
    }

    let mut out = state.clone();
    out.values = psi;
    out.time = t0 + steps as f64 * dt;
    check_boundary(&out.values, out.time)?;
    if steps > 0 {
        if let Some((_, f)) = hooks.snapshot.as_mut() {
            f(&out);
        }
    }

    let stationary = match (acc_physical, acc_lagged) {
        (Some(mut physical), Some(mut lagged)) => {
            if steps > 0 {
                stepper.kinetic(&mut lagged, true);
            }
            physical.iter_mut().zip(&lagged).for_each(|(a, b)| *a += b);
            Some(physical)
        }
        _ => None,
    };
    Ok(Evolution {
        state: out,
        stationary,
        steps,
    })
}
