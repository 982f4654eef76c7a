//! Two-path interference of unstable particles.
//!
//! The analytic model propagates a decaying particle along each arm of a
//! Mach-Zehnder-type interferometer, where a cavity in one arm changes the
//! local decay rate. From the arm amplitudes follow the detector
//! probabilities, the fringe visibility `V = sech(theta)`, the path
//! predictability `P = tanh|theta|` and the duality sum `V^2 + P^2 = 1`.
//!
//! [`oracle`] checks the single-arm amplitudes against a split-step solution
//! of the time-dependent equation, and [`dsl`] reads and writes the `.ifl`
//! layout format.

pub mod amplitude;
pub mod dsl;
pub mod error;
pub mod interferometer;
pub mod layout;
pub mod oracle;
pub mod particle;
pub mod sweep;

pub use amplitude::{
    free_amplitude, path_amplitude, potential_phase, segment_amplitude, ComplexAmplitude,
};
pub use dsl::{parse, serialize, Diagnostic, DiagnosticCode, LayoutDocument};
pub use error::{Error, Result};
pub use interferometer::{
    detection_probabilities, detection_probabilities_summed, duality_audit, effective_theta,
    fringe_scan, is_saturated, predictability, predictability_closed_form, theta_cav,
    visibility_closed_form, visibility_operational, DetectionProbabilities, DualityReport,
    FringeScan, Normalization, DUALITY_TOL, SATURATION_CAP,
};
pub use layout::{
    Arm, Detector, PathSegment, PotentialProfile, SegmentKind, SplitterConvention, TwoPathLayout,
    TOL_GEOM,
};
pub use particle::{UnstableParticle, HIERARCHY_MIN};
pub use sweep::{run_sweep, SweepParameter, SweepRow, SweepScale, SweepSpec};
