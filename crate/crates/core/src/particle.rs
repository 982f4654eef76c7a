use crate::error::{Error, Result};

/// Below this value of `ell * k` the decay length is no longer long compared
/// to the de Broglie wavelength. Computations proceed, but are flagged.
pub const HIERARCHY_MIN: f64 = 100.0;

/// A particle with a real wavenumber and a mean decay propagation length.
///
/// Lengths are in an arbitrary unit shared with the path segments, and `k` is
/// in the inverse of that unit. An infinite `ell` describes a stable particle.
#[derive(Debug, Clone, PartialEq)]
pub struct UnstableParticle {
    k: f64,
    ell: f64,
    label: String,
}

impl UnstableParticle {
    pub fn new(k: f64, ell: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("k must be finite and > 0, got {k}")));
        }
        if ell.is_nan() || ell <= 0.0 {
            return Err(Error::Domain(format!("ell must be > 0 or +inf, got {ell}")));
        }
        Ok(Self {
            k,
            ell,
            label: String::new(),
        })
    }

    pub fn stable(k: f64) -> Result<Self> {
        Self::new(k, f64::INFINITY)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_stable(&self) -> bool {
        self.ell.is_infinite()
    }

    /// de Broglie wavelength `1/k` (the reduced wavelength).
    pub fn wavelength(&self) -> f64 {
        1.0 / self.k
    }

    /// Imaginary part of the complex wavenumber, `1/(2 ell)`.
    pub fn kappa(&self) -> f64 {
        0.5 / self.ell
    }

    /// `ell * k`, the dimensionless ratio of decay length to wavelength.
    pub fn hierarchy(&self) -> f64 {
        self.ell * self.k
    }

    /// True when `ell * k < HIERARCHY_MIN`.
    pub fn hierarchy_warning(&self) -> bool {
        self.hierarchy() < HIERARCHY_MIN
    }

    /// Free-space decay exponent `rate * s / (2 ell)` for a distance `s`
    /// travelled with decay rate `rate` times the free-space rate.
    pub(crate) fn decay_exponent(&self, s: f64, gamma_ratio: f64) -> f64 {
        let weighted = gamma_ratio * s;
        if weighted == 0.0 || self.is_stable() {
            0.0
        } else {
            weighted / (2.0 * self.ell)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(UnstableParticle::new(0.0, 1.0).is_err());
        assert!(UnstableParticle::new(-1.0, 1.0).is_err());
        assert!(UnstableParticle::new(f64::INFINITY, 1.0).is_err());
        assert!(UnstableParticle::new(1.0, 0.0).is_err());
        assert!(UnstableParticle::new(1.0, f64::NAN).is_err());
        assert!(UnstableParticle::new(1.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn hierarchy_flag() {
        let p = UnstableParticle::new(2.0 * std::f64::consts::PI, 1.0).unwrap();
        assert!(p.hierarchy_warning());
        let p = UnstableParticle::new(1.0, 100.0).unwrap();
        assert!(!p.hierarchy_warning());
        assert!(!UnstableParticle::stable(1.0).unwrap().hierarchy_warning());
    }

    #[test]
    fn derived_scales() {
        let p = UnstableParticle::new(4.0, 10.0).unwrap();
        assert_eq!(p.wavelength(), 0.25);
        assert_eq!(p.kappa(), 0.05);
    }
}
