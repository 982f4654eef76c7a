//! Checks the analytic single-arm amplitude against the time-dependent
//! solver.
//!
//! A Gaussian packet starts in a decay-free guard region, crosses a chain of
//! legs with piecewise-constant decay rate, and comes to rest in a second
//! guard region. The surviving norm is compared with `prod |amplitude|^2`;
//! the carrier phase across the legs, read from the time-integrated field at
//! the packet's central energy, is compared with `k * s`.

use rayon::prelude::*;

use crate::amplitude::free_amplitude;
use crate::error::{Error, Result};
use crate::oracle::richardson::{extrapolate, observed_order};
use crate::oracle::solver::{evolve, max_time_step, Hooks};
use crate::oracle::wavepacket::{gaussian_packet, Grid, WavepacketState};
use crate::particle::{UnstableParticle, HIERARCHY_MIN};

/// Relative agreement required between oracle and analytic values.
pub const ORACLE_TOL: f64 = 1e-4;

/// Smallest packet width, in units of `1/k`, the oracle accepts.
pub const MIN_WIDTH_TIMES_K: f64 = 50.0;

/// Packet widths between the packet and the legs at the start and end.
const CLEARANCE: f64 = 6.0;
/// Packet widths between the packet and the grid edge.
const GUARD: f64 = 11.0;
/// Absorbing layer on the left edge, in packet widths. It swallows the weak
/// reflection from the first leg before it can wrap around the grid.
const ABSORBER: f64 = 6.0;
/// Amplitude attenuation (in nepers) across the absorbing layer.
const ABSORBER_DEPTH: f64 = 20.0;
const MAX_GRID_LEN: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub length: f64,
    pub gamma_ratio: f64,
}

impl Leg {
    pub fn new(length: f64, gamma_ratio: f64) -> Self {
        Self {
            length,
            gamma_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResolution {
    /// Packet width (standard deviation of `|psi|^2`) times `k`.
    pub width_times_k: f64,
    /// Grid points per de Broglie wavelength `2 pi / k`.
    pub points_per_wavelength: f64,
    /// Base time step as a fraction of the `STEP_BOUND` limit.
    pub step_fraction: f64,
    /// Number of time steps in the halving ladder.
    pub ladder: usize,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self {
            width_times_k: 100.0,
            points_per_wavelength: 4.0,
            step_fraction: 0.95,
            ladder: 2,
        }
    }
}

impl OracleResolution {
    pub fn validate(&self) -> Result<()> {
        if !(self.points_per_wavelength.is_finite() && self.points_per_wavelength > 2.0) {
            return Err(Error::Config(format!(
                "points_per_wavelength must exceed 2 to resolve the carrier, got {}",
                self.points_per_wavelength
            )));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "step_fraction must be in (0, 1], got {}",
                self.step_fraction
            )));
        }
        if self.ladder < 2 {
            return Err(Error::Config("the time-step ladder needs >= 2 levels".into()));
        }
        if !self.width_times_k.is_finite() {
            return Err(Error::Config("width_times_k must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub measured_norm_decay: f64,
    pub predicted_norm_decay: f64,
    pub phase_advance_measured: f64,
    pub phase_advance_predicted: f64,
    pub grid_spacing: f64,
    /// Finest step of the ladder.
    pub time_step: f64,
    /// `|measured - predicted| / predicted` for the norm decay.
    pub relative_error: f64,
    pub phase_relative_error: f64,
    /// Convergence order of the norm decay in `dt`, when measurable.
    pub observed_order: Option<f64>,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.relative_error <= self.tolerance && self.phase_relative_error <= self.tolerance
    }
}

/// Values measured in one solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMeasurement {
    pub norm_ratio: f64,
    pub phase_advance: f64,
    pub time_step: f64,
    pub steps: usize,
}

/// Refuses parameter sets where the plane-wave amplitude is not expected to
/// match a finite packet to within `tol`.
pub fn check_regime(
    particle: &UnstableParticle,
    legs: &[Leg],
    res: &OracleResolution,
    tol: f64,
) -> Result<()> {
    if particle.hierarchy() < HIERARCHY_MIN {
        return Err(Error::Regime(format!(
            "ell * k = {:.4} is below {HIERARCHY_MIN}; the decay length is not long compared \
             to the wavelength",
            particle.hierarchy()
        )));
    }
    if res.width_times_k < MIN_WIDTH_TIMES_K {
        return Err(Error::Regime(format!(
            "packet width * k = {} is below {MIN_WIDTH_TIMES_K}",
            res.width_times_k
        )));
    }
    if particle.is_stable() {
        return Ok(());
    }
    // Slow and fast momentum components spend different times in the legs:
    // <exp(-b k/q)> = exp(-b) (1 + eps^2 (b^2/2 - b) + ...).
    let b: f64 = legs.iter().map(|l| l.gamma_ratio * l.length).sum::<f64>() / particle.ell();
    let eps = 0.5 / res.width_times_k;
    let spread = eps * eps * (0.5 * b * b - b).abs();
    if spread > 0.5 * tol {
        return Err(Error::Regime(format!(
            "momentum spread shifts the norm decay by ~{spread:.2e}; widen the packet"
        )));
    }
    // Second order in g / (k ell): Re sqrt(k^2 + i g Gamma) drifts from k, and
    // each decay-rate step reflects |r|^2 ~ (g / 4 k ell)^2 of the packet,
    // which then escapes the remaining decay.
    let g_max = legs.iter().map(|l| l.gamma_ratio).fold(0.0, f64::max);
    let x = g_max / particle.hierarchy();
    let edges = x * x * (0.125 + b.exp() / 16.0);
    if edges > 0.5 * tol {
        return Err(Error::Regime(format!(
            "decay-rate steps perturb the plane-wave result by ~{edges:.2e}; \
             ell * k = {:.1} is too small for gamma_ratio {g_max}",
            particle.hierarchy()
        )));
    }
    Ok(())
}

/// Geometry and step ladder for one verification.
#[derive(Debug, Clone)]
pub struct OracleSetup {
    particle: UnstableParticle,
    legs: Vec<Leg>,
    res: OracleResolution,
    grid: Grid,
    width: f64,
    center: f64,
    leg_start: usize,
    leg_end: usize,
    duration: f64,
    base_steps: usize,
}

impl OracleSetup {
    pub fn new(
        particle: &UnstableParticle,
        legs: &[Leg],
        res: &OracleResolution,
        tol: f64,
    ) -> Result<Self> {
        res.validate()?;
        if legs.is_empty() {
            return Err(Error::Config("no legs to verify".into()));
        }
        for leg in legs {
            if !(leg.length.is_finite() && leg.length >= 0.0) {
                return Err(Error::Config(format!("leg length {} is invalid", leg.length)));
            }
            if !(leg.gamma_ratio.is_finite() && leg.gamma_ratio >= 0.0) {
                return Err(Error::Config(format!(
                    "leg gamma_ratio {} is invalid",
                    leg.gamma_ratio
                )));
            }
        }
        let total: f64 = legs.iter().map(|l| l.length).sum();
        if total <= 0.0 {
            return Err(Error::Config("legs have zero total length".into()));
        }
        check_regime(particle, legs, res, tol)?;

        let k = particle.k();
        let width = res.width_times_k / k;
        let target_dx = 2.0 * std::f64::consts::PI / (k * res.points_per_wavelength);
        // The legs span a whole number of cells so both ends sit on grid points.
        let dx = total / (total / target_dx).ceil();
        let leg_start = ((ABSORBER + GUARD + CLEARANCE) * width / dx).ceil() as usize;
        let leg_end = leg_start + (total / dx).round() as usize;
        let x_start = leg_start as f64 * dx;
        let center = x_start - CLEARANCE * width;
        let travel = total + 2.0 * CLEARANCE * width;
        let duration = travel / k;
        let spread = 0.5 * duration / (width * width);
        let final_width = width * (1.0 + spread * spread).sqrt();
        let needed = ((center + travel + GUARD * final_width) / dx).ceil() as usize + 1;
        let len = needed.next_power_of_two();
        if len > MAX_GRID_LEN {
            return Err(Error::Config(format!(
                "oracle grid would need {len} points; shorten the legs"
            )));
        }
        let grid = Grid::new(0.0, dx, len)?;
        let base_steps = (duration / (res.step_fraction * max_time_step(dx))).ceil() as usize;
        Ok(Self {
            particle: particle.clone(),
            legs: legs.to_vec(),
            res: res.clone(),
            grid,
            width,
            center,
            leg_start,
            leg_end,
            duration,
            base_steps,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn time_step(&self, level: usize) -> f64 {
        self.duration / (self.base_steps << level) as f64
    }

    pub fn initial_state(&self) -> Result<WavepacketState> {
        let mut state = gaussian_packet(&self.grid, self.center, self.width, self.particle.k())?
            .with_particle(&self.particle);
        // amplitude decays as exp(-int Gamma dx / 2k); the ramp integrates to peak * layer / 3
        let layer = ABSORBER * self.width;
        let k = self.particle.k();
        let peak_rate = 6.0 * ABSORBER_DEPTH * k / layer;
        if state.decay_rate() > 0.0 {
            state.add_ramp(0.0, layer, peak_rate / state.decay_rate());
        }
        let mut x = self.grid.x(self.leg_start);
        for leg in &self.legs {
            state.add_region(x, x + leg.length, leg.gamma_ratio);
            x += leg.length;
        }
        Ok(state)
    }

    /// `prod |free_amplitude|^2` over the legs.
    pub fn predicted_norm_decay(&self) -> Result<f64> {
        self.legs.iter().try_fold(1.0, |acc, leg| {
            Ok(acc * free_amplitude(&self.particle, leg.length, leg.gamma_ratio)?.norm_sqr())
        })
    }

    pub fn predicted_phase_advance(&self) -> f64 {
        self.particle.k() * self.legs.iter().map(|l| l.length).sum::<f64>()
    }

    /// One solver run at ladder level `level` (step `base / 2^level`).
    pub fn run(
        &self,
        level: usize,
        snapshot: Option<(usize, &mut dyn FnMut(&WavepacketState))>,
    ) -> Result<RunMeasurement> {
        let initial = self.initial_state()?;
        let dt = self.time_step(level);
        let k = self.particle.k();
        let hooks = Hooks {
            stationary_energy: Some(0.5 * k * k),
            snapshot,
        };
        let ev = evolve(&initial, self.duration, dt, hooks)?;
        let field = ev.stationary.expect("stationary accumulator requested");
        let phase_advance = field[self.leg_start..=self.leg_end]
            .windows(2)
            .map(|w| (w[1] * w[0].conj()).arg())
            .sum();
        Ok(RunMeasurement {
            norm_ratio: ev.state.norm() / initial.norm(),
            phase_advance,
            time_step: dt,
            steps: ev.steps,
        })
    }

    /// Runs the whole ladder (levels in parallel) and extrapolates.
    pub fn verify(&self, tol: f64) -> Result<OracleReport> {
        let runs = (0..self.res.ladder)
            .into_par_iter()
            .map(|level| self.run(level, None))
            .collect::<Result<Vec<_>>>()?;
        let n = runs.len();
        let (coarse, fine) = (&runs[n - 2], &runs[n - 1]);
        let measured_norm = extrapolate(coarse.norm_ratio, fine.norm_ratio, 2.0, 2.0);
        let measured_phase = extrapolate(coarse.phase_advance, fine.phase_advance, 2.0, 2.0);
        let observed = if n >= 3 {
            observed_order(
                runs[n - 3].norm_ratio,
                coarse.norm_ratio,
                fine.norm_ratio,
                2.0,
            )
        } else {
            None
        };
        let predicted_norm = self.predicted_norm_decay()?;
        let predicted_phase = self.predicted_phase_advance();
        Ok(OracleReport {
            measured_norm_decay: measured_norm,
            predicted_norm_decay: predicted_norm,
            phase_advance_measured: measured_phase,
            phase_advance_predicted: predicted_phase,
            grid_spacing: self.grid.dx(),
            time_step: fine.time_step,
            relative_error: (measured_norm - predicted_norm).abs() / predicted_norm,
            phase_relative_error: (measured_phase - predicted_phase).abs() / predicted_phase,
            observed_order: observed,
            tolerance: tol,
        })
    }
}

/// Verifies the amplitude of a chain of legs traversed in order.
pub fn verify_legs(
    particle: &UnstableParticle,
    legs: &[Leg],
    res: &OracleResolution,
    tol: f64,
) -> Result<OracleReport> {
    OracleSetup::new(particle, legs, res, tol)?.verify(tol)
}

/// Verifies `free_amplitude(particle, s, gamma_ratio)` for a single leg.
pub fn verify_free_amplitude(
    particle: &UnstableParticle,
    s: f64,
    gamma_ratio: f64,
    res: &OracleResolution,
    tol: f64,
) -> Result<OracleReport> {
    verify_legs(particle, &[Leg::new(s, gamma_ratio)], res, tol)
}
