//! Acceptance checks, one line per criterion. Runs as a plain binary so the
//! PASS/FAIL lines always appear in the test output.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twopath::dsl::{OracleSettings, ParticleInput};
use twopath::oracle::{
    bump_problem, splitting_order, verify_legs, Leg, OracleResolution, MIN_SPLITTING_ORDER,
    ORACLE_TOL,
};
use twopath::{
    detection_probabilities, detection_probabilities_summed, duality_audit, fringe_scan, parse,
    predictability, serialize, visibility_operational, DiagnosticCode, LayoutDocument,
    Normalization, PathSegment, PotentialProfile, SplitterConvention, SweepParameter, SweepScale,
    SweepSpec, TwoPathLayout, UnstableParticle, DUALITY_TOL,
};

type Check = Result<String, String>;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Layout with a cavity of `x = L_cav / 2 ell` and ratio `g`, for `ell = 1`.
fn cavity_layout(x: f64, g: f64) -> TwoPathLayout {
    let l_cav = 2.0 * x;
    TwoPathLayout::mach_zehnder(1.0, l_cav.max(1.0), Some((l_cav, g))).unwrap()
}

fn grid_points() -> impl Iterator<Item = (f64, f64)> {
    (0..101).flat_map(|i| (0..101).map(move |j| (5.0 * i as f64 / 100.0, 10.0 * j as f64 / 100.0)))
}

fn duality_grid() -> Check {
    let p = UnstableParticle::new(200.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (x, g) in grid_points() {
        let r = duality_audit(&cavity_layout(x, g), &p).map_err(|e| e.to_string())?;
        if r.saturated {
            continue;
        }
        worst = worst.max(r.deviation());
        checked += 1;
    }
    if worst <= DUALITY_TOL {
        Ok(format!("{checked} points, max |V^2+P^2-1| = {worst:.2e}"))
    } else {
        Err(format!("max |V^2+P^2-1| = {worst:.2e} > {DUALITY_TOL:e}"))
    }
}

fn random_layout(rng: &mut ChaCha8Rng) -> TwoPathLayout {
    let arm = |rng: &mut ChaCha8Rng| -> Vec<PathSegment> {
        (0..rng.gen_range(1..4))
            .map(|_| {
                let mut s = PathSegment::free(rng.gen_range(0.0..2.0))
                    .with_gamma_ratio(rng.gen_range(0.0..4.0));
                s.phase_offset = rng.gen_range(-PI..PI);
                if rng.gen_bool(0.3) {
                    let n = rng.gen_range(2..6);
                    let samples = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
                    s = s.with_potential(PotentialProfile::new(samples).unwrap());
                }
                s
            })
            .collect()
    };
    let upper = arm(rng);
    let lower = arm(rng);
    let conv = if rng.gen_bool(0.5) {
        SplitterConvention::Paper
    } else {
        SplitterConvention::Hadamard
    };
    TwoPathLayout::with_splitter(upper, lower, conv).unwrap()
}

fn closed_vs_summed() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = UnstableParticle::new(rng.gen_range(1.0..300.0), rng.gen_range(0.1..20.0)).unwrap();
        let layout = random_layout(&mut rng);
        for i in 0..100 {
            let phi = -PI + 2.0 * PI * i as f64 / 99.0;
            let a = detection_probabilities(&layout, &p, phi).map_err(|e| e.to_string())?;
            let b = detection_probabilities_summed(&layout, &p, phi).map_err(|e| e.to_string())?;
            worst = worst.max((a.p1 - b.p1).abs()).max((a.p2 - b.p2).abs());
        }
    }
    if worst <= 1e-12 {
        Ok(format!("20 layouts x 100 phases, max |diff| = {worst:.2e}"))
    } else {
        Err(format!("max |diff| = {worst:.2e} > 1e-12"))
    }
}

fn scan_visibility() -> Check {
    let p = UnstableParticle::new(200.0, 1.0).unwrap();
    let phases: Vec<f64> = (0..10_000).map(|i| 2.0 * PI * i as f64 / 10_000.0).collect();
    let mut worst = 0.0f64;
    for theta in [0.0, 0.1, 0.5, 1.0, 2.0f64] {
        // theta_cav = x (1 - g) with g = 0.
        let layout = cavity_layout(theta, 0.0);
        let scan = fringe_scan(&layout, &p, &phases, Normalization::PerParticle)
            .map_err(|e| e.to_string())?;
        let v = visibility_operational(&scan).map_err(|e| e.to_string())?;
        worst = worst.max((v - 1.0 / theta.cosh()).abs());
    }
    if worst <= 1e-6 {
        Ok(format!("10^4-point scans, max |V - sech| = {worst:.2e}"))
    } else {
        Err(format!("max |V - sech| = {worst:.2e} > 1e-6"))
    }
}

fn stable_reduction() -> Check {
    let p = UnstableParticle::stable(37.0).unwrap();
    let layout = TwoPathLayout::mach_zehnder(1.0, 2.0, Some((0.7, 5.0))).unwrap();
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let phi = -PI + 2.0 * PI * i as f64 / 999.0;
        let d = detection_probabilities(&layout, &p, phi).map_err(|e| e.to_string())?;
        worst = worst.max((d.p1 - 0.5 * (1.0 + phi.cos())).abs());
    }
    if worst <= 1e-15 {
        Ok(format!("max |P1 - (1+cos)/2| = {worst:.2e}"))
    } else {
        Err(format!("max |P1 - (1+cos)/2| = {worst:.2e} > 1e-15"))
    }
}

fn blocked_path() -> Check {
    let p = UnstableParticle::new(200.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for (x, g) in grid_points() {
        let layout = cavity_layout(x, g);
        let r = duality_audit(&layout, &p).map_err(|e| e.to_string())?;
        if r.saturated {
            continue;
        }
        let blocked = predictability(&layout, &p).map_err(|e| e.to_string())?;
        worst = worst.max((blocked - r.theta_cav.abs().tanh()).abs());
    }
    if worst <= 1e-12 {
        Ok(format!("max |P_blocked - tanh| = {worst:.2e}"))
    } else {
        Err(format!("max |P_blocked - tanh| = {worst:.2e} > 1e-12"))
    }
}

fn pde_oracle() -> Check {
    let p = UnstableParticle::new(5.0, 100.0).unwrap();
    let res = OracleResolution::default();
    let mut lines = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    for g in [0.0, 1.0, 2.0] {
        let legs = [Leg::new(50.0, 1.0), Leg::new(50.0, g)];
        let r = verify_legs(&p, &legs, &res, ORACLE_TOL).map_err(|e| e.to_string())?;
        worst = (worst.0.max(r.relative_error), worst.1.max(r.phase_relative_error));
        lines.push(format!("g={g}: {:.1e}/{:.1e}", r.relative_error, r.phase_relative_error));
        if !r.passed() {
            return Err(format!("g = {g}: {r:?}"));
        }
    }
    Ok(format!(
        "width*k = {}, norm/phase rel err {} (max {:.1e}/{:.1e})",
        res.width_times_k,
        lines.join(", "),
        worst.0,
        worst.1
    ))
}

fn splitting() -> Check {
    let state = bump_problem().map_err(|e| e.to_string())?;
    let study = splitting_order(&state, 6.0, 3).map_err(|e| e.to_string())?;
    let order = study.min_order();
    if study.passed() {
        Ok(format!("observed order {order:.3} over dt ladder {:?}", study.time_steps.len()))
    } else {
        Err(format!("observed order {order:.3} < {MIN_SPLITTING_ORDER}"))
    }
}

fn random_f64(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..3) {
        0 => rng.gen_range(-1e3..1e3),
        1 => rng.gen_range(1.0..10.0) * 10f64.powi(rng.gen_range(-300..300)),
        _ => 0.0,
    }
}

fn random_document(rng: &mut ChaCha8Rng) -> LayoutDocument {
    let segment = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
        0 => PathSegment::phase_shifter(random_f64(rng)),
        kind => {
            let (len, g) = (random_f64(rng).abs(), random_f64(rng).abs());
            let mut s = if kind == 1 {
                PathSegment::free(len).with_gamma_ratio(g)
            } else {
                PathSegment::cavity(len, g)
            };
            if rng.gen_bool(0.3) {
                let samples = (0..rng.gen_range(2..6)).map(|_| random_f64(rng)).collect();
                s = s.with_potential(PotentialProfile::new(samples).unwrap());
            }
            s
        }
    };
    let positive = |rng: &mut ChaCha8Rng| loop {
        let x = random_f64(rng).abs();
        if x > 0.0 {
            return x;
        }
    };
    let particle_input = if rng.gen_bool(0.7) {
        ParticleInput::Natural {
            k: positive(rng),
            ell: rng.gen_bool(0.8).then(|| positive(rng)),
        }
    } else {
        ParticleInput::Si {
            momentum: rng.gen_range(1e-30..1e-18),
            mass: rng.gen_range(1e-31..1e-24),
            gamma: if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(1.0..1e9) },
        }
    };
    let splitter = match rng.gen_range(0..3) {
        0 => SplitterConvention::Paper,
        1 => SplitterConvention::Hadamard,
        _ => {
            let (a, b, c) = (rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0));
            let e = |t: f64| Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, t);
            SplitterConvention::Custom {
                matrix: [[e(a), e(b)], [e(c), -e(c + b - a)]],
                mirror: Complex64::from_polar(1.0, rng.gen_range(0.0..6.0)),
            }
        }
    };
    let sweep = rng.gen_bool(0.5).then(|| {
        let start = positive(rng);
        let mut end = positive(rng);
        if end == start {
            end = start * 2.0;
        }
        SweepSpec {
            parameter: SweepParameter::ALL[rng.gen_range(0..3)],
            start,
            end,
            steps: rng.gen_range(2..1000),
            scale: if rng.gen_bool(0.5) { SweepScale::Log } else { SweepScale::Linear },
        }
    });
    let oracle = rng.gen_bool(0.5).then(|| OracleSettings {
        resolution: OracleResolution {
            width_times_k: rng.gen_range(50.0..500.0),
            points_per_wavelength: rng.gen_range(2.5..20.0),
            step_fraction: rng.gen_range(0.01..1.0),
            ladder: rng.gen_range(2..6),
        },
        tolerance: rng.gen_range(1e-9..1e-2),
    });
    let label = rng.gen_bool(0.5).then(|| {
        let alphabet: Vec<char> = "abcXYZ019 _-+".chars().collect();
        (0..rng.gen_range(0..12)).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
    });
    LayoutDocument {
        particle_input,
        label,
        splitter,
        upper: (0..rng.gen_range(1..6)).map(|_| segment(rng)).collect(),
        lower: (0..rng.gen_range(1..6)).map(|_| segment(rng)).collect(),
        sweep,
        oracle,
    }
}

fn parser_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut count = 0;
    while count < 1000 {
        let doc = random_document(&mut rng);
        if doc.validate().is_err() {
            continue;
        }
        let text = serialize(&doc);
        match parse(&text) {
            Ok(back) if back == doc => count += 1,
            Ok(back) => return Err(format!("round trip changed the document:\n{text}\n{back:?}")),
            Err(d) => return Err(format!("canonical text rejected: {d:?}\n{text}")),
        }
    }
    let dir = workspace().join("crates/core/tests/fixtures/invalid");
    let mut fixtures = 0;
    for entry in fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let expect = text
            .lines()
            .find_map(|l| l.strip_prefix("# expect: "))
            .and_then(|c| DiagnosticCode::from_str(c.trim()))
            .ok_or_else(|| format!("{} lacks an expect line", path.display()))?;
        match parse(&text) {
            Err(d) if d.iter().any(|d| d.code == expect) => fixtures += 1,
            other => return Err(format!("{}: expected {expect}, got {other:?}", path.display())),
        }
    }
    Ok(format!("{count} documents round-tripped, {fixtures} invalid fixtures matched"))
}

fn twopath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twopath"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs")
}

fn cli_contract() -> Check {
    let a = twopath(&["sweep", "layouts/baseline.ifl", "--steps", "101"]);
    let b = twopath(&["sweep", "layouts/baseline.ifl", "--steps", "101"]);
    if a.status.code() != Some(0) || a.stdout != b.stdout || a.stdout.is_empty() {
        return Err("repeated sweeps differ or failed".into());
    }
    let csv = String::from_utf8_lossy(&a.stdout);
    if csv.lines().count() != 102 || !csv.starts_with("param,visibility,predictability,duality_sum\n") {
        return Err("sweep CSV has the wrong shape".into());
    }

    let mut expectations: Vec<(Vec<String>, i32)> = vec![
        (vec!["simulate".into(), "layouts/stable.ifl".into(), "--phases".into(), "0:2pi:9".into()], 0),
        (vec!["duality".into(), "layouts/baseline.ifl".into()], 0),
        (vec!["duality".into(), "layouts/saturated.ifl".into()], 0),
        (vec!["fmt".into(), "layouts/oracle.ifl".into()], 0),
        (vec!["duality".into(), "layouts/baseline.ifl".into(), "--duality-tol".into(), "0".into()], 1),
        (vec!["simulate".into(), "layouts/missing.ifl".into()], 2),
        (vec!["oracle".into(), "layouts/short_lived.ifl".into()], 3),
    ];
    let dir = workspace().join("crates/core/tests/fixtures/invalid");
    let mut fixtures: Vec<_> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    fixtures.sort();
    for f in &fixtures {
        expectations.push((vec!["simulate".into(), f.display().to_string()], 2));
    }
    for (args, code) in &expectations {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = twopath(&argv);
        if out.status.code() != Some(*code) {
            return Err(format!(
                "`twopath {}` exited {:?}, expected {code}: {}",
                args.join(" "),
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        if *code == 2 && !out.stdout.is_empty() {
            return Err(format!("`twopath {}` wrote rows despite bad input", args.join(" ")));
        }
    }
    Ok(format!("byte-identical sweeps, {} exit-code cases", expectations.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("duality identity over 101x101 grid", duality_grid),
        ("closed form vs amplitude summation", closed_vs_summed),
        ("operational vs closed-form visibility", scan_visibility),
        ("stable-particle reduction", stable_reduction),
        ("blocked-path predictability vs tanh", blocked_path),
        ("wave-packet oracle", pde_oracle),
        ("splitting order", splitting),
        ("parser round trip and fixtures", parser_round_trip),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
