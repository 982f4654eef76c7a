//! Propagation amplitudes for a single arm.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::layout::{PathSegment, PotentialProfile};
use crate::particle::UnstableParticle;

/// Complex probability amplitude, normalised to 1 at the source.
pub type ComplexAmplitude = Complex64;

/// Amplitude for travelling a distance `s` at `gamma_ratio` times the
/// free-space decay rate: `exp(i k s - gamma_ratio s / (2 ell))`.
pub fn free_amplitude(
    particle: &UnstableParticle,
    s: f64,
    gamma_ratio: f64,
) -> Result<ComplexAmplitude> {
    ensure_finite("path length", s)?;
    ensure_finite("gamma_ratio", gamma_ratio)?;
    if s < 0.0 {
        return Err(Error::Domain(format!("path length must be >= 0, got {s}")));
    }
    if gamma_ratio < 0.0 {
        return Err(Error::Domain(format!(
            "gamma_ratio must be >= 0, got {gamma_ratio}"
        )));
    }
    let decay = particle.decay_exponent(s, gamma_ratio);
    Ok(Complex64::from_polar((-decay).exp(), particle.k() * s))
}

/// Composite Simpson integral of uniformly spaced samples spanning `length`.
///
/// An odd number of intervals closes with the 3/8 rule on the last three;
/// a single interval falls back to the trapezoid rule. Exact for cubics
/// whenever at least three samples are given.
pub fn simpson(samples: &[f64], length: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 2, "simpson needs at least two samples");
    let intervals = n - 1;
    let h = length / intervals as f64;
    if intervals == 1 {
        return 0.5 * h * (samples[0] + samples[1]);
    }
    let simpson_intervals = if intervals % 2 == 0 {
        intervals
    } else {
        intervals - 3
    };
    let mut total = 0.0;
    if simpson_intervals > 0 {
        let mut acc = samples[0] + samples[simpson_intervals];
        for (i, v) in samples[1..simpson_intervals].iter().enumerate() {
            acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
        }
        total += acc * h / 3.0;
    }
    if simpson_intervals < intervals {
        let t = &samples[simpson_intervals..];
        total += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
    }
    total
}

/// Complex phase picked up crossing a weak potential:
/// `-[1 - i/(2 k ell)] * integral(V ds)`.
///
/// The imaginary part is the extra decay from the change in transit time.
pub fn potential_phase(
    particle: &UnstableParticle,
    profile: &PotentialProfile,
    path_length: f64,
) -> Result<Complex64> {
    ensure_finite("path length", path_length)?;
    if path_length < 0.0 {
        return Err(Error::Domain(format!(
            "path length must be >= 0, got {path_length}"
        )));
    }
    if profile.samples().len() < 2 {
        return Err(Error::Domain("potential profile needs >= 2 samples".into()));
    }
    let integral = simpson(profile.samples(), path_length);
    let suppression = if particle.is_stable() {
        0.0
    } else {
        1.0 / (2.0 * particle.k() * particle.ell())
    };
    Ok(-Complex64::new(1.0, -suppression) * integral)
}

pub fn segment_amplitude(
    particle: &UnstableParticle,
    seg: &PathSegment,
) -> Result<ComplexAmplitude> {
    seg.validate()?;
    let mut amp = free_amplitude(particle, seg.length, seg.gamma_ratio)?;
    amp *= Complex64::from_polar(1.0, seg.phase_offset);
    if let Some(profile) = &seg.potential {
        let phi = potential_phase(particle, profile, seg.length)?;
        amp *= (Complex64::i() * phi).exp();
    }
    Ok(amp)
}

/// Product of the junction factor and every segment amplitude along a route.
pub fn path_amplitude(
    particle: &UnstableParticle,
    segments: &[PathSegment],
    junction_factor: ComplexAmplitude,
) -> Result<ComplexAmplitude> {
    if segments.is_empty() {
        return Err(Error::Domain("path has no segments".into()));
    }
    segments.iter().try_fold(junction_factor, |acc, seg| {
        Ok(acc * segment_amplitude(particle, seg)?)
    })
}

/// An arm amplitude in exponent form, `exp(-decay + i phase)`, accumulated
/// by summing exponents rather than multiplying complex numbers.
///
/// The phase is `k * length + offset`; the parts are kept apart so phase
/// differences between arms of equal length cancel exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmExponent {
    pub decay: f64,
    pub phase: f64,
    /// Total geometric length of the arm.
    pub length: f64,
    /// Phase from shifters and potentials.
    pub offset: f64,
}

pub fn arm_exponent(particle: &UnstableParticle, segments: &[PathSegment]) -> Result<ArmExponent> {
    if segments.is_empty() {
        return Err(Error::Domain("path has no segments".into()));
    }
    let mut out = ArmExponent {
        decay: 0.0,
        phase: 0.0,
        length: 0.0,
        offset: 0.0,
    };
    for seg in segments {
        seg.validate()?;
        out.decay += particle.decay_exponent(seg.length, seg.gamma_ratio);
        out.length += seg.length;
        out.offset += seg.phase_offset;
        if let Some(profile) = &seg.potential {
            let phi = potential_phase(particle, profile, seg.length)?;
            out.offset += phi.re;
            out.decay += phi.im;
        }
    }
    out.phase = particle.k() * out.length + out.offset;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn particle(k: f64, ell: f64) -> UnstableParticle {
        UnstableParticle::new(k, ell).unwrap()
    }

    #[test]
    fn zero_length_is_identity() {
        let a = free_amplitude(&particle(3.7, 0.4), 0.0, 1.0).unwrap();
        assert_eq!(a, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn stable_limit_has_unit_modulus() {
        let p = UnstableParticle::stable(5.3).unwrap();
        for s in [0.1, 1.0, 17.0, 1e4] {
            assert!((free_amplitude(&p, s, 1.0).unwrap().norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn decay_over_one_length() {
        let a = free_amplitude(&particle(2.0 * PI, 1.0), 1.0, 1.0).unwrap();
        assert!((a.norm() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn free_amplitude_errors() {
        let p = particle(1.0, 1.0);
        assert!(free_amplitude(&p, -1.0, 1.0).is_err());
        assert!(free_amplitude(&p, 1.0, -1.0).is_err());
        assert!(free_amplitude(&p, f64::NAN, 1.0).is_err());
        assert!(free_amplitude(&p, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn pure_phase_shifter() {
        let a = segment_amplitude(&particle(2.0, 3.0), &PathSegment::phase_shifter(FRAC_PI_2))
            .unwrap();
        assert!((a - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn segment_reduces_to_free() {
        let p = particle(2.5, 3.0);
        let a = segment_amplitude(&p, &PathSegment::free(1.7)).unwrap();
        assert_eq!(a, free_amplitude(&p, 1.7, 1.0).unwrap());
    }

    #[test]
    fn zero_potential_has_no_phase() {
        let prof = PotentialProfile::new(vec![0.0; 9]).unwrap();
        let phi = potential_phase(&particle(2.0, 5.0), &prof, 3.0).unwrap();
        assert_eq!(phi, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn constant_potential_closed_form() {
        let p = particle(2.0, 5.0);
        let (v, len) = (0.3, 4.0);
        for n in [2, 3, 4, 7, 10] {
            let prof = PotentialProfile::new(vec![v; n]).unwrap();
            let phi = potential_phase(&p, &prof, len).unwrap();
            let expected = -v * len * Complex64::new(1.0, -1.0 / (2.0 * 2.0 * 5.0));
            assert!((phi - expected).norm() < 1e-14, "n = {n}: {phi} vs {expected}");
        }
    }

    #[test]
    fn ramp_potential_against_analytic_integral() {
        let p = particle(3.0, 40.0);
        let (a, len) = (0.07, 2.5);
        let expected = -(a * len * len / 2.0) * Complex64::new(1.0, -1.0 / (2.0 * 3.0 * 40.0));
        for n in [3, 4, 5, 8, 101] {
            let samples = (0..n).map(|i| a * len * i as f64 / (n - 1) as f64).collect();
            let prof = PotentialProfile::new(samples).unwrap();
            let phi = potential_phase(&p, &prof, len).unwrap();
            assert!(
                (phi - expected).norm() <= 1e-10 * expected.norm(),
                "n = {n}: {phi} vs {expected}"
            );
        }
    }

    #[test]
    fn segment_with_constant_potential() {
        let p = particle(2.0, 5.0);
        let prof = PotentialProfile::new(vec![0.2; 5]).unwrap();
        let seg = PathSegment::free(3.0).with_potential(prof);
        let got = segment_amplitude(&p, &seg).unwrap();
        let phase = -0.2 * 3.0 * Complex64::new(1.0, -1.0 / 20.0);
        let expected = free_amplitude(&p, 3.0, 1.0).unwrap() * (Complex64::i() * phase).exp();
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn path_amplitude_junction_passthrough() {
        let j = Complex64::new(0.0, -0.5);
        let got = path_amplitude(&particle(1.0, 1.0), &[PathSegment::free(0.0)], j).unwrap();
        assert_eq!(got, j);
        assert!(path_amplitude(&particle(1.0, 1.0), &[], j).is_err());
    }

    #[test]
    fn stable_lower_path() {
        let p = UnstableParticle::stable(1.3).unwrap();
        let (h0, l0) = (2.0, 3.0);
        let segs = [PathSegment::free(h0), PathSegment::free(l0), PathSegment::phase_shifter(0.0)];
        let j = Complex64::new(0.0, -0.5);
        let got = path_amplitude(&p, &segs, j).unwrap();
        let expected = j * Complex64::from_polar(1.0, 1.3 * (h0 + l0));
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn cavity_path_magnitude() {
        let p = particle(7.0, 2.0);
        let (h0, l0, l_cav, g) = (1.5, 2.5, 0.8, 0.3);
        let segs = [
            PathSegment::cavity(l_cav, g),
            PathSegment::free(l0 - l_cav),
            PathSegment::free(h0),
        ];
        let got = path_amplitude(&p, &segs, Complex64::new(0.0, -0.5)).unwrap();
        // Per-segment magnitudes multiplied one by one.
        let mut brute = 0.5;
        for (len, rate) in [(l_cav, g), (l0 - l_cav, 1.0), (h0, 1.0)] {
            brute *= (-rate * len / (2.0 * 2.0)).exp();
        }
        assert!((got.norm() - brute).abs() < 1e-15);
        let eq16 = 0.5 * (-(h0 + l0 - l_cav) / 4.0).exp() * (-l_cav * g / 4.0).exp();
        assert!((got.norm() - eq16).abs() < 1e-15);
    }

    #[test]
    fn exponent_form_matches_product() {
        let p = particle(3.0, 7.0);
        let prof = PotentialProfile::new(vec![0.1, 0.3, -0.2, 0.05]).unwrap();
        let segs = [
            PathSegment::cavity(1.2, 2.5),
            PathSegment::free(0.7).with_potential(prof),
            PathSegment::phase_shifter(1.1),
        ];
        let e = arm_exponent(&p, &segs).unwrap();
        let prod = path_amplitude(&p, &segs, Complex64::new(1.0, 0.0)).unwrap();
        let from_exp = Complex64::from_polar((-e.decay).exp(), e.phase);
        assert!((prod - from_exp).norm() < 1e-14);
    }
}
