//! Shared inputs for the criterion benchmarks in `benches/`.

use twopath::{TwoPathLayout, UnstableParticle};

/// Standard layout with a decay-free cavity, `theta_cav = 0.5`.
pub fn baseline() -> (TwoPathLayout, UnstableParticle) {
    (
        TwoPathLayout::mach_zehnder(1.0, 2.0, Some((1.0, 0.0))).unwrap(),
        UnstableParticle::new(200.0, 1.0).unwrap(),
    )
}

/// Canonical text of a document exercising every section.
pub const DOCUMENT: &str = "\
particle {
    ell = 1.0;
    k = 200.0;
    label = \"bench\";
}

splitter {
    convention = custom;
    matrix = [0.7071067811865476, 0.0, 0.0, 0.7071067811865476, 0.0, 0.7071067811865476, 0.7071067811865476, 0.0];
    mirror = [-1.0, 0.0];
}

path upper {
    cavity(gamma_ratio=0.0, length=1.0);
    segment(gamma_ratio=1.0, length=1.0, potential=[0.0, 0.1, 0.2, 0.1, 0.0]);
}

path lower {
    segment(gamma_ratio=1.0, length=2.0);
    phase(phi=0.0);
}

sweep {
    end = 4.0;
    parameter = gamma_ratio;
    scale = linear;
    start = 0.0;
    steps = 41;
}

oracle {
    ladder = 2;
    points_per_wavelength = 4.0;
    step_fraction = 0.95;
    tolerance = 0.0001;
    width_times_k = 100.0;
}
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_is_canonical() {
        let doc = twopath::parse(DOCUMENT).unwrap();
        assert_eq!(twopath::serialize(&doc), DOCUMENT);
        baseline();
    }
}
