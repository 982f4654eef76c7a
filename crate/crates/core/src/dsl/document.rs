use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::layout::{PathSegment, SegmentKind, SplitterConvention, TwoPathLayout};
use crate::oracle::{OracleResolution, ORACLE_TOL};
use crate::particle::UnstableParticle;
use crate::sweep::SweepSpec;

/// Reduced Planck constant in J s (exact SI value).
pub const HBAR_SI: f64 = 1.054571817e-34;

/// How the particle was written down. Kept as entered so documents
/// round-trip; [`LayoutDocument::particle`] does the conversion.
#[derive(Debug, Clone, PartialEq)]
pub enum ParticleInput {
    /// `k` and `ell` in the document's length unit; `None` is a stable particle.
    Natural { k: f64, ell: Option<f64> },
    /// Momentum (kg m/s), mass (kg) and rest-frame decay rate (1/s).
    /// Lengths in the paths are then in metres. A zero rate is stable.
    Si {
        momentum: f64,
        mass: f64,
        gamma: f64,
    },
}

impl ParticleInput {
    /// `(k, ell)` with `k = p / hbar` and `ell = p / (m Gamma)` for SI input.
    pub fn natural(&self) -> (f64, f64) {
        match *self {
            Self::Natural { k, ell } => (k, ell.unwrap_or(f64::INFINITY)),
            Self::Si {
                momentum,
                mass,
                gamma,
            } => {
                let ell = if gamma == 0.0 {
                    f64::INFINITY
                } else {
                    momentum / (mass * gamma)
                };
                (momentum / HBAR_SI, ell)
            }
        }
    }
}

/// Overrides for the numerical oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSettings {
    pub resolution: OracleResolution,
    pub tolerance: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            resolution: OracleResolution::default(),
            tolerance: ORACLE_TOL,
        }
    }
}

/// Everything a `.ifl` file describes.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutDocument {
    pub particle_input: ParticleInput,
    pub label: Option<String>,
    pub splitter: SplitterConvention,
    pub upper: Vec<PathSegment>,
    pub lower: Vec<PathSegment>,
    pub sweep: Option<SweepSpec>,
    pub oracle: Option<OracleSettings>,
}

impl Default for LayoutDocument {
    /// A unit-length free segment in each arm of a `k = 10`, `ell = 100`
    /// particle, with the paper splitter.
    fn default() -> Self {
        Self {
            particle_input: ParticleInput::Natural {
                k: 10.0,
                ell: Some(100.0),
            },
            label: None,
            splitter: SplitterConvention::Paper,
            upper: vec![PathSegment::free(1.0)],
            lower: vec![PathSegment::free(1.0)],
            sweep: None,
            oracle: None,
        }
    }
}

impl LayoutDocument {
    pub fn particle(&self) -> Result<UnstableParticle> {
        let (k, ell) = self.particle_input.natural();
        let p = UnstableParticle::new(k, ell)?;
        Ok(match &self.label {
            Some(label) => p.with_label(label.clone()),
            None => p,
        })
    }

    pub fn layout(&self) -> Result<TwoPathLayout> {
        TwoPathLayout::with_splitter(self.upper.clone(), self.lower.clone(), self.splitter.clone())
    }

    pub fn oracle_settings(&self) -> OracleSettings {
        self.oracle.clone().unwrap_or_default()
    }

    /// Checks the pieces a parsed document would have rejected.
    pub fn validate(&self) -> Result<()> {
        self.particle()?;
        self.layout()?;
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        if let Some(o) = &self.oracle {
            o.resolution.validate()?;
            if !(o.tolerance.is_finite() && o.tolerance > 0.0) {
                return Err(Error::Config(format!("oracle tolerance {} must be > 0", o.tolerance)));
            }
        }
        if let Some(label) = &self.label {
            if label.contains(['"', '\n']) {
                return Err(Error::Domain("labels cannot contain quotes or newlines".into()));
            }
        }
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

fn element(seg: &PathSegment) -> String {
    match seg.kind {
        SegmentKind::PhaseShifter => format!("phase(phi={})", num(seg.phase_offset)),
        SegmentKind::Free | SegmentKind::Cavity => {
            let name = if seg.kind == SegmentKind::Cavity {
                "cavity"
            } else {
                "segment"
            };
            let mut args = vec![
                format!("gamma_ratio={}", num(seg.gamma_ratio)),
                format!("length={}", num(seg.length)),
            ];
            if let Some(p) = &seg.potential {
                args.push(format!("potential={}", list(p.samples())));
            }
            format!("{name}({})", args.join(", "))
        }
    }
}

/// Canonical text: fixed section order, keys sorted within each section,
/// element arguments sorted, floats in shortest round-trip form. Phase
/// shifters carry only their phase.
pub fn serialize(doc: &LayoutDocument) -> String {
    let mut out = String::new();
    let mut section = |head: &str, lines: Vec<String>| {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "{head} {{");
        for line in lines {
            let _ = writeln!(out, "    {line};");
        }
        out.push_str("}\n");
    };

    let mut particle = Vec::new();
    match &doc.particle_input {
        ParticleInput::Natural { k, ell } => {
            particle.push(format!(
                "ell = {}",
                ell.map_or_else(|| "stable".to_string(), num)
            ));
            particle.push(format!("k = {}", num(*k)));
            if let Some(label) = &doc.label {
                particle.push(format!("label = \"{label}\""));
            }
        }
        ParticleInput::Si {
            momentum,
            mass,
            gamma,
        } => {
            particle.push(format!("gamma_si = {}", num(*gamma)));
            if let Some(label) = &doc.label {
                particle.push(format!("label = \"{label}\""));
            }
            particle.push(format!("mass_si = {}", num(*mass)));
            particle.push(format!("momentum_si = {}", num(*momentum)));
        }
    }
    section("particle", particle);

    let splitter = match &doc.splitter {
        SplitterConvention::Paper => vec!["convention = paper".to_string()],
        SplitterConvention::Hadamard => vec!["convention = hadamard".to_string()],
        SplitterConvention::Custom { matrix, mirror } => {
            let flat: Vec<f64> = matrix
                .iter()
                .flatten()
                .flat_map(|z| [z.re, z.im])
                .collect();
            vec![
                "convention = custom".to_string(),
                format!("matrix = {}", list(&flat)),
                format!("mirror = {}", list(&[mirror.re, mirror.im])),
            ]
        }
    };
    section("splitter", splitter);

    section("path upper", doc.upper.iter().map(element).collect());
    section("path lower", doc.lower.iter().map(element).collect());

    if let Some(s) = &doc.sweep {
        section(
            "sweep",
            vec![
                format!("end = {}", num(s.end)),
                format!("parameter = {}", s.parameter.name()),
                format!("scale = {}", s.scale.name()),
                format!("start = {}", num(s.start)),
                format!("steps = {}", s.steps),
            ],
        );
    }
    if let Some(o) = &doc.oracle {
        let r = &o.resolution;
        section(
            "oracle",
            vec![
                format!("ladder = {}", r.ladder),
                format!("points_per_wavelength = {}", num(r.points_per_wavelength)),
                format!("step_fraction = {}", num(r.step_fraction)),
                format!("tolerance = {}", num(o.tolerance)),
                format!("width_times_k = {}", num(r.width_times_k)),
            ],
        );
    }
    out
}
