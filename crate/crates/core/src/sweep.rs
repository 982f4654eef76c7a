//! Parameter sweeps of visibility and predictability.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interferometer::duality_audit;
use crate::layout::{Arm, PathSegment, SegmentKind, TwoPathLayout};
use crate::particle::UnstableParticle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    /// Decay-rate ratio of the upper-arm cavity.
    GammaRatio,
    /// Upper-arm cavity length in units of `ell`. The following free segment
    /// absorbs the change so the arm length stays fixed.
    CavityLengthOverEll,
    /// Phase of the lower-arm phase shifter.
    Phase,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::GammaRatio => "gamma_ratio",
            Self::CavityLengthOverEll => "cavity_length_over_ell",
            Self::Phase => "phase",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gamma_ratio" => Some(Self::GammaRatio),
            "cavity_length_over_ell" => Some(Self::CavityLengthOverEll),
            "phase" => Some(Self::Phase),
            _ => None,
        }
    }

    pub const ALL: [Self; 3] = [Self::GammaRatio, Self::CavityLengthOverEll, Self::Phase];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

impl SweepScale {
    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "linear" => Some(Self::Linear),
            "log" => Some(Self::Log),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn new(
        parameter: SweepParameter,
        start: f64,
        end: f64,
        steps: usize,
        scale: SweepScale,
    ) -> Result<Self> {
        let spec = Self {
            parameter,
            start,
            end,
            steps,
            scale,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(Error::Domain("sweep endpoints must be finite".into()));
        }
        if self.steps < 2 {
            return Err(Error::Domain(format!("sweep needs >= 2 steps, got {}", self.steps)));
        }
        if self.start == self.end {
            return Err(Error::Domain("sweep start and end must differ".into()));
        }
        if self.scale == SweepScale::Log && !(self.start > 0.0 && self.end > 0.0) {
            return Err(Error::Domain("log sweeps need positive endpoints".into()));
        }
        Ok(())
    }

    /// Grid values in sweep order; both endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == last {
                    return self.end;
                }
                let t = i as f64 / last as f64;
                match self.scale {
                    SweepScale::Linear => self.start + (self.end - self.start) * t,
                    SweepScale::Log => self.start * (self.end / self.start).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub visibility: f64,
    pub predictability: f64,
    pub duality_sum: f64,
    pub saturated: bool,
}

fn single_index(layout: &TwoPathLayout, arm: Arm, kind: SegmentKind) -> Result<usize> {
    let mut found = layout
        .arm(arm)
        .iter()
        .enumerate()
        .filter(|(_, s)| s.kind == kind);
    let first = found
        .next()
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Domain(format!("no {kind:?} segment in the {arm:?} arm")))?;
    if kind == SegmentKind::Cavity && found.next().is_some() {
        return Err(Error::Domain(
            "sweeps need exactly one cavity in the upper arm".into(),
        ));
    }
    Ok(first)
}

/// Layout with the swept parameter set to `value`.
pub fn apply_parameter(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
    parameter: SweepParameter,
    value: f64,
) -> Result<TwoPathLayout> {
    let mut out = layout.clone();
    match parameter {
        SweepParameter::GammaRatio => {
            let i = single_index(layout, Arm::Upper, SegmentKind::Cavity)?;
            let seg = layout.upper()[i].clone().with_gamma_ratio(value);
            out.replace_segment(Arm::Upper, i, seg)?;
        }
        SweepParameter::CavityLengthOverEll => {
            if particle.is_stable() {
                return Err(Error::Domain(
                    "cavity_length_over_ell is undefined for a stable particle".into(),
                ));
            }
            let i = single_index(layout, Arm::Upper, SegmentKind::Cavity)?;
            let upper = layout.upper();
            let new_len = value * particle.ell();
            let delta = new_len - upper[i].length;
            let filler = (i + 1..upper.len())
                .chain((0..i).rev())
                .find(|&j| upper[j].kind == SegmentKind::Free)
                .ok_or_else(|| {
                    Error::Domain("no free segment in the upper arm to absorb the cavity".into())
                })?;
            let mut cavity = upper[i].clone();
            cavity.length = new_len;
            let mut free = upper[filler].clone();
            free.length -= delta;
            if free.length < 0.0 {
                return Err(Error::Domain(format!(
                    "cavity length {new_len} does not fit in the upper arm"
                )));
            }
            out.replace_segment(Arm::Upper, i, cavity)?;
            out.replace_segment(Arm::Upper, filler, free)?;
        }
        SweepParameter::Phase => {
            let i = single_index(layout, Arm::Lower, SegmentKind::PhaseShifter)?;
            let seg = PathSegment::phase_shifter(value);
            out.replace_segment(Arm::Lower, i, seg)?;
        }
    }
    Ok(out)
}

/// Evaluates the duality audit at every sweep value. Grid points run in
/// parallel; rows come back in sweep order.
pub fn run_sweep(
    layout: &TwoPathLayout,
    particle: &UnstableParticle,
    spec: &SweepSpec,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.values()
        .into_par_iter()
        .map(|value| {
            let l = apply_parameter(layout, particle, spec.parameter, value)?;
            let r = duality_audit(&l, particle)?;
            Ok(SweepRow {
                param: value,
                visibility: r.visibility,
                predictability: r.predictability,
                duality_sum: r.duality_sum,
                saturated: r.saturated,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> (TwoPathLayout, UnstableParticle) {
        (
            TwoPathLayout::mach_zehnder(1.0, 2.0, Some((0.5, 0.0))).unwrap(),
            UnstableParticle::new(20.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn spec_validation() {
        use SweepParameter::GammaRatio;
        assert!(SweepSpec::new(GammaRatio, 0.0, 1.0, 1, SweepScale::Linear).is_err());
        assert!(SweepSpec::new(GammaRatio, 1.0, 1.0, 5, SweepScale::Linear).is_err());
        assert!(SweepSpec::new(GammaRatio, 0.0, 1.0, 5, SweepScale::Log).is_err());
        assert!(SweepSpec::new(GammaRatio, 0.1, 10.0, 5, SweepScale::Log).is_ok());
    }

    #[test]
    fn values_hit_endpoints() {
        let s = SweepSpec::new(SweepParameter::GammaRatio, 0.1, 10.0, 3, SweepScale::Log).unwrap();
        let v = s.values();
        assert_eq!(v[0], 0.1);
        assert_eq!(v[2], 10.0);
        assert!((v[1] - 1.0).abs() < 1e-15);
        let s = SweepSpec::new(SweepParameter::Phase, 0.0, 1.0, 2, SweepScale::Linear).unwrap();
        assert_eq!(s.values(), vec![0.0, 1.0]);
    }

    #[test]
    fn gamma_sweep_peaks_at_one() {
        let (l, p) = base();
        let s = SweepSpec::new(SweepParameter::GammaRatio, 0.0, 2.0, 21, SweepScale::Linear)
            .unwrap();
        let rows = run_sweep(&l, &p, &s).unwrap();
        let best = rows
            .iter()
            .max_by(|a, b| a.visibility.total_cmp(&b.visibility))
            .unwrap();
        assert_eq!(best.param, 1.0);
        assert_eq!(best.visibility, 1.0);
        assert!(rows.iter().all(|r| (r.duality_sum - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn cavity_length_keeps_arm_length() {
        let (l, p) = base();
        let out = apply_parameter(&l, &p, SweepParameter::CavityLengthOverEll, 1.5).unwrap();
        assert_eq!(out.upper()[0].length, 1.5);
        assert!(out.is_symmetric());
        assert!(apply_parameter(&l, &p, SweepParameter::CavityLengthOverEll, 2.5).is_err());
    }

    #[test]
    fn multiple_cavities_rejected() {
        let (_, p) = base();
        let l = TwoPathLayout::new(
            vec![PathSegment::cavity(0.2, 0.0), PathSegment::cavity(0.2, 0.0)],
            vec![PathSegment::free(0.4)],
        )
        .unwrap();
        assert!(apply_parameter(&l, &p, SweepParameter::GammaRatio, 2.0).is_err());
    }
}
