use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::Vector3;

use relepr_cli::commands::{self, Formula};
use relepr_cli::scenario::{read_json, ScanSpec, ScenarioFile};
use relepr_cli::{parse_vector, CliError};

/// EPR correlations for observers moving relative to a preferred frame.
///
/// Velocities are in units of c, angles in radians. Exit codes: 0 success,
/// 2 parse error, 3 synchronization singularity, 4 formula singularity,
/// 5 region overlap, 1 anything else.
#[derive(Parser)]
#[command(name = "relepr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the boost between two frames, their metrics and Einstein equivalents.
    Transform {
        /// Preferred-frame velocity of observer A, as x,y,z.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true, default_value = "0,0,0")]
        sigma_a: Vector3<f64>,
        /// Preferred-frame velocity of observer B, as x,y,z.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true, conflicts_with = "velocity")]
        sigma_b: Option<Vector3<f64>>,
        /// Coordinate velocity of B seen by A, as x,y,z.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        velocity: Option<Vector3<f64>>,
    },
    /// Correlation for one scenario as a CSV row.
    Correlate {
        #[arg(long)]
        scenario: PathBuf,
        /// Report only this formula.
        #[arg(long, value_enum)]
        formula: Option<Formula>,
        /// Divide the reported value by -weight/4.
        #[arg(long)]
        normalized: bool,
    },
    /// Perpendicular-analyzer correction surface over (alpha, beta).
    ScanPerp {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 picks the number of cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Sequential, joint and closed-form correlations on a lattice.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        /// Largest accepted difference between the three paths.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Transform { sigma_a, sigma_b, velocity } => {
            let sigma_b = if velocity.is_none() { Some(sigma_b.unwrap_or_default()) } else { sigma_b };
            commands::transform(&mut out, sigma_a, sigma_b, velocity)?
        }
        Command::Correlate { scenario, formula, normalized } => {
            let file: ScenarioFile = read_json(&scenario)?;
            commands::correlate(&mut out, &file, formula, normalized)?
        }
        Command::ScanPerp { scenario, out: path, threads } => {
            let spec: ScanSpec = read_json(&scenario)?;
            let csv = commands::scan_perp(&spec, threads)?;
            std::fs::write(&path, csv)?;
        }
        Command::Oracle { scenario, tolerance } => {
            let file: ScenarioFile = read_json(&scenario)?;
            commands::oracle(&mut out, &file, tolerance)?
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relepr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
