//! `twopath`: simulations, sweeps, duality audits and oracle checks for
//! `.ifl` interferometer layouts.
//!
//! Exit codes: 0 success, 1 a physics check failed, 2 bad input, 3 the
//! oracle refused the parameter regime.

mod commands;
mod phases;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twopath::{SweepParameter, SweepScale, DUALITY_TOL};

#[derive(Parser, Debug)]
#[command(name = "twopath", version, about = "Two-path interference of unstable particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detector probabilities over a phase grid, as CSV `phi,p1,p2,survival`.
    Simulate {
        file: PathBuf,
        /// Phase grid `start:end:count`; endpoints accept a `pi` suffix.
        #[arg(long, default_value = "0:2pi:101", value_parser = phases::parse_grid)]
        phases: phases::PhaseGrid,
        #[command(flatten)]
        output: Output,
    },
    /// Visibility and predictability over a parameter sweep, as CSV
    /// `param,visibility,predictability,duality_sum`. Flags override the
    /// file's sweep section.
    Sweep {
        file: PathBuf,
        #[arg(long, value_parser = parse_parameter)]
        parameter: Option<SweepParameter>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        end: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_parser = parse_scale)]
        scale: Option<SweepScale>,
        #[command(flatten)]
        output: Output,
    },
    /// One-line report of V, P, V^2 + P^2 and theta_cav.
    Duality {
        file: PathBuf,
        #[arg(long, default_value_t = DUALITY_TOL)]
        duality_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Checks every segment's decay and phase against the wave-packet solver.
    Oracle {
        file: PathBuf,
        /// Relative tolerance [default: 1e-4, or the file's oracle section].
        #[arg(long)]
        oracle_tol: Option<f64>,
        #[arg(long)]
        width_times_k: Option<f64>,
        #[arg(long)]
        points_per_wavelength: Option<f64>,
        #[arg(long)]
        step_fraction: Option<f64>,
        #[arg(long)]
        ladder: Option<usize>,
        /// Write CSV snapshots of the coarsest run into this directory.
        #[arg(long, value_name = "DIR")]
        snapshot_dir: Option<PathBuf>,
        /// Time steps between snapshots.
        #[arg(long, default_value_t = 1000)]
        snapshot_stride: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Rewrites a layout file in canonical form.
    Fmt {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_parameter(s: &str) -> Result<SweepParameter, String> {
    SweepParameter::from_name(s).ok_or_else(|| {
        let names: Vec<_> = SweepParameter::ALL.iter().map(|p| p.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_scale(s: &str) -> Result<SweepScale, String> {
    SweepScale::from_name(s).ok_or_else(|| "expected linear or log".to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            file,
            phases,
            output,
        } => commands::simulate(&file, &phases, output.out.as_deref()),
        Command::Sweep {
            file,
            parameter,
            start,
            end,
            steps,
            scale,
            output,
        } => commands::sweep(
            &file,
            commands::SweepOverrides {
                parameter,
                start,
                end,
                steps,
                scale,
            },
            output.out.as_deref(),
        ),
        Command::Duality {
            file,
            duality_tol,
            output,
        } => commands::duality(&file, duality_tol, output.out.as_deref()),
        Command::Oracle {
            file,
            oracle_tol,
            width_times_k,
            points_per_wavelength,
            step_fraction,
            ladder,
            snapshot_dir,
            snapshot_stride,
            output,
        } => commands::oracle(
            &file,
            commands::OracleOverrides {
                tolerance: oracle_tol,
                width_times_k,
                points_per_wavelength,
                step_fraction,
                ladder,
            },
            snapshot_dir.as_deref().map(|d| (d, snapshot_stride)),
            output.out.as_deref(),
        ),
        Command::Fmt { file, output } => commands::fmt(&file, output.out.as_deref()),
    };
    match result {
        Ok(code) => code.into(),
        Err(failure) => {
            eprintln!("{failure}");
            failure.exit_code()
        }
    }
}
