//! Geometry of the two interferometer arms.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// Relative tolerance for the equal-arm-length check.
pub const TOL_GEOM: f64 = 1e-9;

/// Which arm of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    /// Path ABD, which hosts the cavity in the standard layout.
    Upper,
    /// Path ACD, which hosts the phase shifter in the standard layout.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    One,
    Two,
}

/// The role an element plays in its arm. Physics only looks at the numeric
/// fields; the kind is kept so documents round-trip and sweeps can locate the
/// cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Free,
    Cavity,
    PhaseShifter,
}

/// Potential sampled uniformly along a segment, from its start to its end.
///
/// Samples are in units where `m V / (hbar p)` is an inverse length, so the
/// line integral of the samples over the segment is a phase in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    samples: Vec<f64>,
}

impl PotentialProfile {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "potential profile needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for &v in &samples {
            ensure_finite("potential sample", v)?;
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    pub kind: SegmentKind,
    pub length: f64,
    /// Local decay rate divided by the free-space rate.
    pub gamma_ratio: f64,
    /// Phase in radians added by a phase shifter.
    pub phase_offset: f64,
    pub potential: Option<PotentialProfile>,
}

impl PathSegment {
    pub fn free(length: f64) -> Self {
        Self {
            kind: SegmentKind::Free,
            length,
            gamma_ratio: 1.0,
            phase_offset: 0.0,
            potential: None,
        }
    }

    pub fn cavity(length: f64, gamma_ratio: f64) -> Self {
        Self {
            kind: SegmentKind::Cavity,
            length,
            gamma_ratio,
            phase_offset: 0.0,
            potential: None,
        }
    }

    pub fn phase_shifter(phi: f64) -> Self {
        Self {
            kind: SegmentKind::PhaseShifter,
            length: 0.0,
            gamma_ratio: 1.0,
            phase_offset: phi,
            potential: None,
        }
    }

    pub fn with_gamma_ratio(mut self, gamma_ratio: f64) -> Self {
        self.gamma_ratio = gamma_ratio;
        self
    }

    pub fn with_potential(mut self, potential: PotentialProfile) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("segment length", self.length)?;
        ensure_finite("gamma_ratio", self.gamma_ratio)?;
        ensure_finite("phase offset", self.phase_offset)?;
        if self.length < 0.0 {
            return Err(Error::Domain(format!(
                "segment length must be >= 0, got {}",
                self.length
            )));
        }
        if self.gamma_ratio < 0.0 {
            return Err(Error::Domain(format!(
                "gamma_ratio must be >= 0, got {}",
                self.gamma_ratio
            )));
        }
        Ok(())
    }
}

/// Beamsplitter and mirror amplitudes.
///
/// Port convention: the source enters port 0 of the first splitter; output 0
/// feeds the lower arm and output 1 the upper arm. At the second splitter the
/// lower arm enters port 0 and the upper arm port 1; output 1 is detector #1
/// and output 0 is detector #2.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitterConvention {
    /// Transmission `1/sqrt 2`, reflection `i/sqrt 2`, mirror `-1`.
    Paper,
    /// Real Hadamard splitter `[[1, 1], [1, -1]] / sqrt 2`, mirror `-1`.
    Hadamard,
    /// Any balanced lossless splitter; `matrix[out][in]`.
    Custom {
        matrix: [[Complex64; 2]; 2],
        mirror: Complex64,
    },
}

impl Default for SplitterConvention {
    fn default() -> Self {
        Self::Paper
    }
}

impl SplitterConvention {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::Paper => {
                let t = Complex64::new(h, 0.0);
                let r = Complex64::new(0.0, h);
                [[t, r], [r, t]]
            }
            Self::Hadamard => {
                let a = Complex64::new(h, 0.0);
                [[a, a], [a, -a]]
            }
            Self::Custom { matrix, .. } => *matrix,
        }
    }

    pub fn mirror(&self) -> Complex64 {
        match self {
            Self::Paper | Self::Hadamard => Complex64::new(-1.0, 0.0),
            Self::Custom { mirror, .. } => *mirror,
        }
    }

    /// Checks the matrix is unitary with all entries of modulus `1/sqrt 2`
    /// and the mirror is lossless.
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-12;
        let m = self.matrix();
        for row in &m {
            for z in row {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::Domain("splitter entries must be finite".into()));
                }
                if (z.norm_sqr() - 0.5).abs() > TOL {
                    return Err(Error::Domain(format!(
                        "splitter must be balanced: |entry|^2 = {}",
                        z.norm_sqr()
                    )));
                }
            }
        }
        // Columns orthogonal.
        let overlap = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        if overlap.norm() > TOL {
            return Err(Error::Domain("splitter matrix is not unitary".into()));
        }
        if (self.mirror().norm() - 1.0).abs() > TOL {
            return Err(Error::Domain("mirror amplitude must have modulus 1".into()));
        }
        Ok(())
    }

    /// Ordered product of splitter and mirror amplitudes for one route.
    pub fn junction_factor(&self, arm: Arm, detector: Detector) -> Complex64 {
        let m = self.matrix();
        let arm_port = match arm {
            Arm::Lower => 0,
            Arm::Upper => 1,
        };
        let det_port = match detector {
            Detector::One => 1,
            Detector::Two => 0,
        };
        m[det_port][arm_port] * self.mirror() * m[arm_port][0]
    }
}

/// Both arms of a Mach-Zehnder-type interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPathLayout {
    upper: Vec<PathSegment>,
    lower: Vec<PathSegment>,
    splitter: SplitterConvention,
}

impl TwoPathLayout {
    pub fn new(upper: Vec<PathSegment>, lower: Vec<PathSegment>) -> Result<Self> {
        Self::with_splitter(upper, lower, SplitterConvention::default())
    }

    pub fn with_splitter(
        upper: Vec<PathSegment>,
        lower: Vec<PathSegment>,
        splitter: SplitterConvention,
    ) -> Result<Self> {
        if upper.is_empty() || lower.is_empty() {
            return Err(Error::Domain("both arms need at least one segment".into()));
        }
        for seg in upper.iter().chain(&lower) {
            seg.validate()?;
        }
        splitter.validate()?;
        Ok(Self {
            upper,
            lower,
            splitter,
        })
    }

    /// The standard layout: arm lengths `h0` and `l0`, an optional cavity
    /// `(length, gamma_ratio)` at the start of the upper `l0` leg, and a phase
    /// shifter with `phi = 0` at the end of the lower arm.
    pub fn mach_zehnder(h0: f64, l0: f64, cavity: Option<(f64, f64)>) -> Result<Self> {
        let mut upper = Vec::new();
        match cavity {
            Some((l_cav, gamma_ratio)) => {
                if l_cav > l0 {
                    return Err(Error::Domain(format!(
                        "cavity length {l_cav} exceeds its arm length {l0}"
                    )));
                }
                upper.push(PathSegment::cavity(l_cav, gamma_ratio));
                upper.push(PathSegment::free(l0 - l_cav));
            }
            None => upper.push(PathSegment::free(l0)),
        }
        upper.push(PathSegment::free(h0));
        let lower = vec![
            PathSegment::free(h0),
            PathSegment::free(l0),
            PathSegment::phase_shifter(0.0),
        ];
        Self::new(upper, lower)
    }

    pub fn upper(&self) -> &[PathSegment] {
        &self.upper
    }

    pub fn lower(&self) -> &[PathSegment] {
        &self.lower
    }

    pub fn arm(&self, arm: Arm) -> &[PathSegment] {
        match arm {
            Arm::Upper => &self.upper,
            Arm::Lower => &self.lower,
        }
    }

    pub fn splitter(&self) -> &SplitterConvention {
        &self.splitter
    }

    pub fn set_splitter(&mut self, splitter: SplitterConvention) -> Result<()> {
        splitter.validate()?;
        self.splitter = splitter;
        Ok(())
    }

    /// Replaces one segment, re-validating it.
    pub fn replace_segment(&mut self, arm: Arm, index: usize, seg: PathSegment) -> Result<()> {
        seg.validate()?;
        let list = match arm {
            Arm::Upper => &mut self.upper,
            Arm::Lower => &mut self.lower,
        };
        let slot = list
            .get_mut(index)
            .ok_or_else(|| Error::Domain(format!("no segment {index} in {arm:?} arm")))?;
        *slot = seg;
        Ok(())
    }

    pub fn arm_length(&self, arm: Arm) -> f64 {
        self.arm(arm).iter().map(|s| s.length).sum()
    }

    /// True when both arms have the same total length within `TOL_GEOM`.
    pub fn is_symmetric(&self) -> bool {
        let a = self.arm_length(Arm::Upper);
        let b = self.arm_length(Arm::Lower);
        (a - b).abs() <= TOL_GEOM * a.abs().max(b.abs())
    }

    /// Same geometry with the arms exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            upper: self.lower.clone(),
            lower: self.upper.clone(),
            splitter: self.splitter.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_junction_factors() {
        let conv = SplitterConvention::Paper;
        let minus_half_i = Complex64::new(0.0, -0.5);
        for arm in [Arm::Upper, Arm::Lower] {
            let j = conv.junction_factor(arm, Detector::One);
            assert!((j - minus_half_i).norm() < 1e-15, "{arm:?}: {j}");
        }
        let up = conv.junction_factor(Arm::Upper, Detector::Two);
        let low = conv.junction_factor(Arm::Lower, Detector::Two);
        assert!((up + low).norm() < 1e-15);
        assert!((up.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conventions_validate() {
        assert!(SplitterConvention::Paper.validate().is_ok());
        assert!(SplitterConvention::Hadamard.validate().is_ok());
        let one = Complex64::new(1.0, 0.0);
        let lossy = SplitterConvention::Custom {
            matrix: [[one, one], [one, one]],
            mirror: -one,
        };
        assert!(lossy.validate().is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let unbalanced_mirror = SplitterConvention::Custom {
            matrix: SplitterConvention::Hadamard.matrix(),
            mirror: Complex64::new(h, 0.0),
        };
        assert!(unbalanced_mirror.validate().is_err());
    }

    #[test]
    fn empty_arm_rejected() {
        assert!(TwoPathLayout::new(vec![], vec![PathSegment::free(1.0)]).is_err());
        assert!(TwoPathLayout::new(vec![PathSegment::free(1.0)], vec![]).is_err());
    }

    #[test]
    fn negative_values_rejected() {
        assert!(PathSegment::free(-1.0).validate().is_err());
        assert!(PathSegment::cavity(1.0, -0.5).validate().is_err());
        assert!(PathSegment::free(f64::NAN).validate().is_err());
        assert!(PotentialProfile::new(vec![1.0]).is_err());
    }

    #[test]
    fn symmetry_flag() {
        let sym = TwoPathLayout::mach_zehnder(1.0, 2.0, Some((0.5, 0.0))).unwrap();
        assert!(sym.is_symmetric());
        let asym = TwoPathLayout::new(vec![PathSegment::free(1.0)], vec![PathSegment::free(1.1)])
            .unwrap();
        assert!(!asym.is_symmetric());
    }
}
