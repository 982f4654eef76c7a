//! Convergence order of the split-step integrator in the time step.
//!
//! The sharp-edged oracle runs sit at rounding level in `dt`, so the order is
//! measured on a small problem built to have a large splitting error: a
//! slow packet crossing a smooth, strong decay bump on a coarse grid, with
//! the base step at the stability bound.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::solver::{max_time_step, propagate};
use crate::oracle::wavepacket::{gaussian_packet, Grid, WavepacketState};

/// Minimum observed order accepted for the second-order splitting.
pub const MIN_SPLITTING_ORDER: f64 = 1.8;

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingStudy {
    /// Time steps of the ladder, coarsest first.
    pub time_steps: Vec<f64>,
    /// `||psi(dt) - psi(dt/2)||` for consecutive rungs.
    pub differences: Vec<f64>,
    /// `log2` of consecutive difference ratios.
    pub orders: Vec<f64>,
}

impl SplittingStudy {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        !self.orders.is_empty() && self.min_order() >= MIN_SPLITTING_ORDER
    }
}

/// The bump problem: packet at `k0 = 2`, width 3, bump height `Gamma = 2`,
/// width 2, on 512 points of spacing 0.25.
pub fn bump_problem() -> Result<WavepacketState> {
    let grid = Grid::new(-64.0, 0.25, 512)?;
    let mut state = gaussian_packet(&grid, -12.0, 3.0, 2.0)?.with_decay_rate(2.0)?;
    state.add_profile(|x| (-(x * x) / 8.0).exp());
    Ok(state)
}

/// Propagates `state` over `duration` with `rungs` halvings of the step,
/// starting from the largest step allowed on the grid.
pub fn splitting_order(state: &WavepacketState, duration: f64, rungs: usize) -> Result<SplittingStudy> {
    if rungs < 3 {
        return Err(Error::Config(format!("need at least 3 rungs, got {rungs}")));
    }
    let base = (duration / max_time_step(state.grid().dx())).ceil() as usize;
    let time_steps: Vec<f64> = (0..rungs).map(|i| duration / (base << i) as f64).collect();
    let finals = time_steps
        .par_iter()
        .map(|&dt| propagate(state, duration, dt))
        .collect::<Result<Vec<_>>>()?;
    let dx = state.grid().dx();
    let differences: Vec<f64> = finals
        .windows(2)
        .map(|w| {
            let sq: f64 = w[0]
                .values()
                .iter()
                .zip(w[1].values())
                .map(|(a, b): (&Complex64, &Complex64)| (a - b).norm_sqr())
                .sum();
            (sq * dx).sqrt()
        })
        .collect();
    let orders = differences
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    Ok(SplittingStudy {
        time_steps,
        differences,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_problem_is_second_order() {
        let state = bump_problem().unwrap();
        let study = splitting_order(&state, 6.0, 3).unwrap();
        assert!(study.differences[0] > 1e-8, "{study:?}");
        assert!(study.passed(), "{study:?}");
        assert!(study.min_order() < 2.3, "{study:?}");
    }

    #[test]
    fn too_few_rungs() {
        let state = bump_problem().unwrap();
        assert!(splitting_order(&state, 1.0, 2).is_err());
    }
}
