//! Detection probabilities, fringe visibility, path predictability and the
//! duality audit for a two-path layout.

use num_complex::Complex64;

use crate::amplitude::{arm_exponent, path_amplitude, ArmExponent};
use crate::error::{ensure_finite, Error, Result};
use crate::layout::{Arm, Detector, TwoPathLayout};
use crate::particle::UnstableParticle;

/// Allowed deviation of `V^2 + P^2` from 1.
pub const DUALITY_TOL: f64 = 1e-12;

/// Largest per-segment decay exponent `gamma_ratio * L / (2 ell)` treated as
/// finite. Beyond it the cavity counts as infinitely enhancing.
pub const SATURATION_CAP: f64 = 700.0;

/// `sum (L / 2 ell)(1 - gamma_ratio)` over the upper arm minus the same sum
/// over the lower arm. Free segments (`gamma_ratio = 1`) contribute nothing.
pub fn theta_cav(layout: &TwoPathLayout, particle: &UnstableParticle) -> f64 {
    if particle.is_stable() {
        return 0.0;
    }
    let arm_sum = |arm: Arm| -> f64 {
        layout
            .arm(arm)
            .iter()
            .map(|s| s.length / (2.0 * particle.ell()) * (1.0 - s.gamma_ratio))
            .sum()
    };
    arm_sum(Arm::Upper) - arm_sum(Arm::Lower)
}

/// Difference of the arm decay exponents, lower minus upper.
///
/// Equal to `theta_cav` when the arms have equal length and carry no
/// potential; otherwise it also absorbs the length and potential asymmetry.
pub fn effective_theta(layout: &TwoPathLayout, particle: &UnstableParticle) -> Result<f64> {
    let lower = arm_exponent(particle, layout.lower())?;
    let upper = arm_exponent(particle, layout.upper())?;
    Ok(lower.decay - upper.decay)
}

/// True when some segment's decay exponent exceeds `SATURATION_CAP`.
pub fn is_saturated(layout: &TwoPathLayout, particle: &UnstableParticle) -> bool {
    layout
        .upper()
        .iter()
        .chain(layout.lower())
        .any(|s| particle.decay_exponent(s.length, s.gamma_ratio) > SATURATION_CAP)
}

/// Probabilities of arriving undecayed at either detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionProbabilities {
    pub p1: f64,
    pub p2: f64,
    /// `p1 + p2`, the probability of reaching any detector undecayed.
    pub survival: f64,
    pub phase: f64,
    pub saturated: bool,
}

impl DetectionProbabilities {
    fn new(p1: f64, p2: f64, phase: f64, saturated: bool) -> Self {
        Self {
            p1,
            p2,
            survival: p1 + p2,
            phase,
            saturated,
        }
    }

    pub fn probability(&self, detector: Detector) -> f64 {
        match detector {
            Detector::One => self.p1,
            Detector::Two => self.p2,
        }
    }
}

struct ClosedForm {
    k: f64,
    lower: ArmExponent,
    upper: ArmExponent,
    theta: f64,
}

impl ClosedForm {
    fn new(layout: &TwoPathLayout, particle: &UnstableParticle) -> Result<Self> {
        let lower = arm_exponent(particle, layout.lower())?;
        let upper = arm_exponent(particle, layout.upper())?;
        Ok(Self {
            k: particle.k(),
            lower,
            upper,
            theta: lower.decay - upper.decay,
        })
    }

    /// `(1/4) e^{-2 D_lower} (1 + e^{2 theta})`, evaluated without forming
    /// `e^{2 theta}` on its own.
    fn prefactor(&self) -> f64 {
        let d = 2.0 * self.lower.decay;
        0.25 * ((-d).exp() + (2.0 * self.theta - d).exp())
    }

    fn sech(&self) -> f64 {
        1.0 / self.theta.cosh()
    }

    fn fringe_phase(&self, layout: &TwoPathLayout, detector: Detector, phase: f64) -> f64 {
        let conv = layout.splitter();
        let j_lower = conv.junction_factor(Arm::Lower, detector).arg();
        let j_upper = conv.junction_factor(Arm::Upper, detector).arg();
        self.k * (self.lower.length - self.upper.length)
            + (self.lower.offset - self.upper.offset)
            + (j_lower - j_upper)
            + phase
    }

    fn probability(&self, layout: &TwoPathLayout, detector: Detector, phase: f64) -> f64 {
        let delta = self.fringe_phase(layout, detector, phase);
        self.prefactor() * (1.0 + self.sech() * delta.cos())
    }

    fn peak(&self) -> f64 {
        self.prefactor() * (1.0 + self.sech())
    }
}

/// Detector probabilities from the closed forms
/// `P_{1,2} = (1/4) e^{-2 D} (1 + e^{2 theta})(1 +/- sech(theta) cos(phi))`,
/// with the fringe offset set by the arm phases and splitter convention.
///
/// `phase` is added to the lower arm on top of its own phase shifters.
pub fn detection_probabilities(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
    phase: f64,
) -> Result<DetectionProbabilities> {
    ensure_finite("phase", phase)?;
    let cf = ClosedForm::new(layout, particle)?;
    Ok(DetectionProbabilities::new(
        cf.probability(layout, Detector::One, phase),
        cf.probability(layout, Detector::Two, phase),
        phase,
        is_saturated(layout, particle),
    ))
}

/// Detector probabilities as `|psi_lower + psi_upper|^2`, summing the complex
/// route amplitudes directly.
pub fn detection_probabilities_summed(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
    phase: f64,
) -> Result<DetectionProbabilities> {
    ensure_finite("phase", phase)?;
    let shift = Complex64::from_polar(1.0, phase);
    let conv = layout.splitter();
    let at = |detector: Detector| -> Result<f64> {
        let lower = path_amplitude(
            particle,
            layout.lower(),
            conv.junction_factor(Arm::Lower, detector),
        )? * shift;
        let upper = path_amplitude(
            particle,
            layout.upper(),
            conv.junction_factor(Arm::Upper, detector),
        )?;
        Ok((lower + upper).norm_sqr())
    };
    Ok(DetectionProbabilities::new(
        at(Detector::One)?,
        at(Detector::Two)?,
        phase,
        is_saturated(layout, particle),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Detector #1 probability per incident particle.
    PerParticle,
    /// Scaled so the fringe peak equals 1.
    Relative,
}

/// Detector #1 intensity sampled over a phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    phases: Vec<f64>,
    intensities: Vec<f64>,
    normalization: Normalization,
}

impl FringeScan {
    pub fn new(
        phases: Vec<f64>,
        intensities: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if phases.len() != intensities.len() {
            return Err(Error::Domain(format!(
                "{} phases but {} intensities",
                phases.len(),
                intensities.len()
            )));
        }
        check_phase_grid(&phases)?;
        if let Some(bad) = intensities.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!(
                "intensities must be finite and >= 0, got {bad}"
            )));
        }
        Ok(Self {
            phases,
            intensities,
            normalization,
        })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// `(index, value)` of the first maximum and first minimum.
    pub fn extrema(&self) -> ((usize, f64), (usize, f64)) {
        let mut max = (0, self.intensities[0]);
        let mut min = max;
        for (i, &v) in self.intensities.iter().enumerate().skip(1) {
            if v > max.1 {
                max = (i, v);
            }
            if v < min.1 {
                min = (i, v);
            }
        }
        (max, min)
    }
}

fn check_phase_grid(phases: &[f64]) -> Result<()> {
    if phases.len() < 3 {
        return Err(Error::Domain(format!(
            "a fringe scan needs at least 3 phases, got {}",
            phases.len()
        )));
    }
    for &p in phases {
        ensure_finite("phase", p)?;
    }
    if phases.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("phases must be strictly increasing".into()));
    }
    Ok(())
}

pub fn fringe_scan(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
    phases: &[f64],
    normalization: Normalization,
) -> Result<FringeScan> {
    check_phase_grid(phases)?;
    let cf = ClosedForm::new(layout, particle)?;
    let scale = match normalization {
        Normalization::PerParticle => 1.0,
        Normalization::Relative => {
            let peak = cf.peak();
            if peak <= 0.0 {
                return Err(Error::Domain(
                    "relative normalisation needs a non-zero fringe peak".into(),
                ));
            }
            1.0 / peak
        }
    };
    let intensities = phases
        .iter()
        .map(|&phi| scale * cf.probability(layout, Detector::One, phi))
        .collect();
    FringeScan::new(phases.to_vec(), intensities, normalization)
}

/// `(I_max - I_min) / (I_max + I_min)` over the sampled grid, no interpolation.
pub fn visibility_operational(scan: &FringeScan) -> Result<f64> {
    let ((_, max), (_, min)) = scan.extrema();
    if max + min <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((max - min) / (max + min))
}

/// `sech(theta)`; exactly 0 for a saturated layout.
pub fn visibility_closed_form(layout: &TwoPathLayout, particle: &UnstableParticle) -> Result<f64> {
    if is_saturated(layout, particle) {
        return Ok(0.0);
    }
    Ok(1.0 / effective_theta(layout, particle)?.cosh())
}

fn blocked_probability(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
    open: Arm,
) -> Result<f64> {
    let conv = layout.splitter();
    [Detector::One, Detector::Two]
        .into_iter()
        .map(|d| {
            path_amplitude(particle, layout.arm(open), conv.junction_factor(open, d))
                .map(|a| a.norm_sqr())
        })
        .sum()
}

/// Predictability from blocking one arm at a time: the renormalised
/// difference of the two single-arm detection probabilities.
pub fn predictability(layout: &TwoPathLayout, particle: &UnstableParticle) -> Result<f64> {
    if is_saturated(layout, particle) {
        return Ok(1.0);
    }
    let lower = blocked_probability(layout, particle, Arm::Lower)?;
    let upper = blocked_probability(layout, particle, Arm::Upper)?;
    let total = lower + upper;
    if total <= 0.0 {
        return Err(Error::UndefinedPredictability);
    }
    Ok(((lower - upper) / total).abs())
}

/// `tanh |theta|`; exactly 1 for a saturated layout.
pub fn predictability_closed_form(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
) -> Result<f64> {
    if is_saturated(layout, particle) {
        return Ok(1.0);
    }
    Ok(effective_theta(layout, particle)?.abs().tanh())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub visibility: f64,
    pub predictability: f64,
    /// `V^2 + P^2`.
    pub duality_sum: f64,
    pub theta_cav: f64,
    pub theta_eff: f64,
    pub saturated: bool,
}

impl DualityReport {
    pub fn deviation(&self) -> f64 {
        (self.duality_sum - 1.0).abs()
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.deviation() <= tol
    }
}

/// Closed-form visibility against blocked-path predictability.
pub fn duality_audit(layout: &TwoPathLayout, particle: &UnstableParticle) -> Result<DualityReport> {
    let visibility = visibility_closed_form(layout, particle)?;
    let predictability = predictability(layout, particle)?;
    Ok(DualityReport {
        visibility,
        predictability,
        duality_sum: visibility * visibility + predictability * predictability,
        theta_cav: theta_cav(layout, particle),
        theta_eff: effective_theta(layout, particle)?,
        saturated: is_saturated(layout, particle),
    })
}
