use std::fmt::{self, Write as _};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use twopath::oracle::{Leg, OracleReport, OracleSetup, WavepacketState};
use twopath::{
    detection_probabilities, duality_audit, parse, run_sweep, serialize, Error, LayoutDocument,
    SegmentKind, SweepParameter, SweepScale, SweepSpec, TwoPathLayout, UnstableParticle,
};

use crate::phases::PhaseGrid;

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input; exit 2.
    Input(String),
    /// The oracle declined the parameters; exit 3.
    Regime(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(2),
            Failure::Regime(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "error: {m}"),
            Failure::Regime(m) => write!(f, "refused: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Regime(m) => Failure::Regime(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Successful run; `Fail` means a physics check did not hold (exit 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Fail => ExitCode::from(1),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

/// Shortest representation that reads back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn load(file: &Path) -> Result<LayoutDocument, Failure> {
    let text = fs::read_to_string(file)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", file.display())))?;
    parse(&text).map_err(|diags| {
        let mut msg = format!("{} has {} problem(s)", file.display(), diags.len());
        for d in diags {
            let _ = write!(msg, "\n{}:{d}", file.display());
        }
        Failure::Input(msg)
    })
}

fn model(doc: &LayoutDocument) -> Result<(UnstableParticle, TwoPathLayout), Failure> {
    let particle = doc.particle()?;
    if particle.hierarchy_warning() {
        eprintln!(
            "warning: ell * k = {:.3} is small; the decay-length hierarchy assumed by the model \
             does not hold",
            particle.hierarchy()
        );
    }
    Ok((particle, doc.layout()?))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Input(format!("cannot write output: {e}"));
    match out {
        Some(path) => fs::write(path, text).map_err(io_err),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            w.write_all(text.as_bytes()).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
    }
}

fn saturation_warning() {
    eprintln!(
        "warning: a segment's decay exponent exceeds the saturation cap; the upper and lower \
         arms no longer overlap numerically (V = 0, P = 1)"
    );
}

pub fn simulate(file: &Path, phases: &PhaseGrid, out: Option<&Path>) -> CmdResult {
    let doc = load(file)?;
    let (particle, layout) = model(&doc)?;
    let mut csv = String::from("phi,p1,p2,survival\n");
    let mut saturated = false;
    for phi in phases.values() {
        let d = detection_probabilities(&layout, &particle, phi)?;
        saturated |= d.saturated;
        let _ = writeln!(csv, "{},{},{},{}", num(phi), num(d.p1), num(d.p2), num(d.survival));
    }
    if saturated {
        saturation_warning();
    }
    emit(out, &csv)?;
    Ok(Outcome::Pass)
}

#[derive(Debug, Default)]
pub struct SweepOverrides {
    pub parameter: Option<SweepParameter>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub steps: Option<usize>,
    pub scale: Option<SweepScale>,
}

fn sweep_spec(doc: &LayoutDocument, o: &SweepOverrides) -> Result<SweepSpec, Failure> {
    let base = doc.sweep.as_ref();
    let need = |name: &str| {
        Failure::Input(format!(
            "no sweep {name}: add a sweep section to the file or pass --{name}"
        ))
    };
    let spec = SweepSpec {
        parameter: o
            .parameter
            .or(base.map(|s| s.parameter))
            .ok_or_else(|| need("parameter"))?,
        start: o.start.or(base.map(|s| s.start)).ok_or_else(|| need("start"))?,
        end: o.end.or(base.map(|s| s.end)).ok_or_else(|| need("end"))?,
        steps: o.steps.or(base.map(|s| s.steps)).ok_or_else(|| need("steps"))?,
        scale: o
            .scale
            .or(base.map(|s| s.scale))
            .unwrap_or(SweepScale::Linear),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn sweep(file: &Path, overrides: SweepOverrides, out: Option<&Path>) -> CmdResult {
    let doc = load(file)?;
    let (particle, layout) = model(&doc)?;
    let spec = sweep_spec(&doc, &overrides)?;
    let rows = run_sweep(&layout, &particle, &spec)?;
    let mut csv = String::from("param,visibility,predictability,duality_sum\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            num(r.param),
            num(r.visibility),
            num(r.predictability),
            num(r.duality_sum)
        );
    }
    if rows.iter().any(|r| r.saturated) {
        saturation_warning();
    }
    emit(out, &csv)?;
    Ok(Outcome::Pass)
}

pub fn duality(file: &Path, tol: f64, out: Option<&Path>) -> CmdResult {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Input(format!("--duality-tol must be >= 0, got {tol}")));
    }
    let doc = load(file)?;
    let (particle, layout) = model(&doc)?;
    let r = duality_audit(&layout, &particle)?;
    let line = format!(
        "visibility={} predictability={} duality_sum={} theta_cav={}{}\n",
        num(r.visibility),
        num(r.predictability),
        num(r.duality_sum),
        num(r.theta_cav),
        if r.saturated { " saturated=true" } else { "" }
    );
    if r.saturated {
        saturation_warning();
    }
    emit(out, &line)?;
    if r.holds(tol) {
        Ok(Outcome::Pass)
    } else {
        eprintln!(
            "duality check failed: |V^2 + P^2 - 1| = {:e} > {tol:e}",
            r.deviation()
        );
        Ok(Outcome::Fail)
    }
}

#[derive(Debug, Default)]
pub struct OracleOverrides {
    pub tolerance: Option<f64>,
    pub width_times_k: Option<f64>,
    pub points_per_wavelength: Option<f64>,
    pub step_fraction: Option<f64>,
    pub ladder: Option<usize>,
}

fn report_lines(out: &mut String, name: &str, leg: &Leg, r: &OracleReport) {
    let mut kv = |key: &str, value: String| {
        let _ = writeln!(out, "{name}.{key}={value}");
    };
    kv("length", num(leg.length));
    kv("gamma_ratio", num(leg.gamma_ratio));
    kv("measured_norm_decay", num(r.measured_norm_decay));
    kv("predicted_norm_decay", num(r.predicted_norm_decay));
    kv("relative_error", num(r.relative_error));
    kv("phase_advance_measured", num(r.phase_advance_measured));
    kv("phase_advance_predicted", num(r.phase_advance_predicted));
    kv("phase_relative_error", num(r.phase_relative_error));
    kv("grid_spacing", num(r.grid_spacing));
    kv("time_step", num(r.time_step));
    kv(
        "observed_order",
        r.observed_order.map_or_else(|| "none".to_string(), num),
    );
    kv("tolerance", num(r.tolerance));
    kv("passed", r.passed().to_string());
}

fn write_snapshots(
    setup: &OracleSetup,
    dir: &Path,
    stride: usize,
    name: &str,
) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    let mut first_error: Option<io::Error> = None;
    let mut index = 0usize;
    let mut hook = |state: &WavepacketState| {
        if first_error.is_some() {
            return;
        }
        let path = dir.join(format!("{name}_{index:05}.csv"));
        index += 1;
        let result = fs::File::create(&path).and_then(|f| {
            let mut w = BufWriter::new(f);
            state.write_csv(&mut w, 1)?;
            w.flush()
        });
        if let Err(e) = result {
            first_error = Some(e);
        }
    };
    setup.run(0, Some((stride.max(1), &mut hook)))?;
    match first_error {
        Some(e) => Err(Failure::Input(format!("cannot write snapshot: {e}"))),
        None => Ok(()),
    }
}

pub fn oracle(
    file: &Path,
    o: OracleOverrides,
    snapshots: Option<(&Path, usize)>,
    out: Option<&Path>,
) -> CmdResult {
    let doc = load(file)?;
    let (particle, layout) = model(&doc)?;
    let mut settings = doc.oracle_settings();
    let r = &mut settings.resolution;
    if let Some(v) = o.width_times_k {
        r.width_times_k = v;
    }
    if let Some(v) = o.points_per_wavelength {
        r.points_per_wavelength = v;
    }
    if let Some(v) = o.step_fraction {
        r.step_fraction = v;
    }
    if let Some(v) = o.ladder {
        r.ladder = v;
    }
    if let Some(v) = o.tolerance {
        settings.tolerance = v;
    }
    if !(settings.tolerance.is_finite() && settings.tolerance > 0.0) {
        return Err(Failure::Input(format!(
            "oracle tolerance must be > 0, got {}",
            settings.tolerance
        )));
    }
    settings.resolution.validate()?;

    let mut legs = Vec::new();
    for (arm, segments) in [("upper", layout.upper()), ("lower", layout.lower())] {
        for (i, seg) in segments.iter().enumerate() {
            if seg.length == 0.0 || seg.kind == SegmentKind::PhaseShifter {
                continue;
            }
            if seg.potential.is_some() {
                eprintln!("note: {arm}.{i} carries a potential, which the solver does not model; skipped");
                continue;
            }
            legs.push((format!("{arm}.{i}"), Leg::new(seg.length, seg.gamma_ratio)));
        }
    }
    if legs.is_empty() {
        return Err(Failure::Input("no segment with non-zero length to verify".into()));
    }

    // Refuse up front, before any expensive run.
    let setups = legs
        .iter()
        .map(|(_, leg)| OracleSetup::new(&particle, &[*leg], &settings.resolution, settings.tolerance))
        .collect::<Result<Vec<_>, _>>()?;

    let mut text = String::new();
    let mut all_passed = true;
    for ((name, leg), setup) in legs.iter().zip(&setups) {
        if let Some((dir, stride)) = snapshots {
            write_snapshots(setup, dir, stride, name)?;
        }
        let report = setup.verify(settings.tolerance)?;
        all_passed &= report.passed();
        report_lines(&mut text, name, leg, &report);
    }
    let _ = writeln!(text, "passed={all_passed}");
    emit(out, &text)?;
    Ok(if all_passed {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

pub fn fmt(file: &Path, out: Option<&Path>) -> CmdResult {
    let doc = load(file)?;
    emit(out, &serialize(&doc))?;
    Ok(Outcome::Pass)
}
