//! Independent numerical check of the analytic amplitudes with a
//! split-step solver of the time-dependent equation with a decay term.

pub mod order;
pub mod richardson;
pub mod solver;
pub mod verify;
pub mod wavepacket;

pub use order::{bump_problem, splitting_order, SplittingStudy, MIN_SPLITTING_ORDER};
pub use solver::{evolve, max_time_step, propagate, Evolution, Hooks, BOUNDARY_LIMIT, STEP_BOUND};
pub use verify::{
    check_regime, verify_free_amplitude, verify_legs, Leg, OracleReport, OracleResolution,
    OracleSetup, RunMeasurement, MIN_WIDTH_TIMES_K, ORACLE_TOL,
};
pub use wavepacket::{gaussian_packet, Grid, WavepacketState};
