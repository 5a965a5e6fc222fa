//! `fairnoma` — fair power allocation for a two-user NOMA downlink.
//!
//! Exit codes: 0 success, 1 numerical or validation failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fairnoma_cli::checks;
use fairnoma_cli::commands::{self, AlphaSweep, PolicyArg, SnrSweep};
use fairnoma_cli::error::CliError;
use fairnoma_cli::rows::OutputFormat;
use fairnoma_core::ergodic::QuadratureConfig;

#[derive(Parser)]
#[command(
    name = "fairnoma",
    version,
    about = "Fair power allocation for a two-user NOMA downlink",
    long_about = "Computes the power-allocation interval in which both users of a \
                  superposition-coded downlink meet or beat their orthogonal-access \
                  capacity, and sweeps its instantaneous, ergodic and Monte Carlo \
                  capacities into plot-ready CSV or JSON."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output encoding for machine-readable commands
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fair allocation interval and endpoint capacities for one gain pair
    Region {
        /// Channel SNR gains of the two users, e.g. --gains 1.0,4.0
        #[arg(long, value_parser = parse_gains)]
        gains: (f64, f64),
        /// Transmit SNR in dB
        #[arg(long)]
        snr_db: f64,
        /// Mean channel SNR gain (Rayleigh scale)
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// All six capacities for one gain pair at one explicit allocation
    Capacity {
        #[arg(long, value_parser = parse_gains)]
        gains: (f64, f64),
        #[arg(long)]
        snr_db: f64,
        /// Fraction of power for the strong user, in (0, 1)
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ergodic capacities on a transmit-SNR grid (dB)
    SweepSnr {
        /// First grid point in dB
        #[arg(long)]
        start: f64,
        /// Last grid point in dB
        #[arg(long)]
        stop: f64,
        /// Number of grid points (at least 2)
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Add Monte Carlo rows with this many samples per estimate
        #[arg(long)]
        samples: Option<u64>,
        /// Allocation policy for Monte Carlo NOMA rows (repeatable)
        #[arg(long, value_enum)]
        policy: Vec<PolicyArg>,
        /// Allocation used by --policy fixed
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Capacities on a power-allocation grid at one SNR
    SweepAlpha {
        /// First allocation grid point, in (0, 1)
        #[arg(long)]
        start: f64,
        /// Last allocation grid point, in (0, 1)
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        steps: u32,
        #[arg(long)]
        snr_db: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Sweep one fixed pair exactly (mutually exclusive with --samples)
        #[arg(long, value_parser = parse_gains)]
        gains: Option<(f64, f64)>,
        /// Sweep Monte Carlo expectations over the fading distribution
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-method agreement checks; nonzero exit if any fails
    Validate {
        /// Samples for each Monte Carlo leg
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_gains(raw: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated gains, got '{raw}'"));
    }
    let g1: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", parts[0]))?;
    let g2: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", parts[1]))?;
    if !(g1.is_finite() && g1 > 0.0 && g2.is_finite() && g2 > 0.0) {
        return Err(format!("gains must be positive and finite, got {g1},{g2}"));
    }
    Ok((g1, g2))
}

fn open_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Failure(format!("--out {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Region {
            gains,
            snr_db,
            beta,
            output,
        } => {
            let mut sink = open_sink(&output.out)?;
            commands::cmd_region(&mut sink, gains, snr_db, beta, output.format)
        }
        Command::Capacity {
            gains,
            snr_db,
            alpha,
            beta,
            output,
        } => {
            let mut sink = open_sink(&output.out)?;
            commands::cmd_capacity(&mut sink, gains, snr_db, beta, alpha, output.format)
        }
        Command::SweepSnr {
            start,
            stop,
            steps,
            beta,
            samples,
            policy,
            alpha,
            seed,
            output,
        } => {
            // The allocation-policy trio used throughout the sum-capacity
            // comparisons is the default when Monte Carlo rows are requested.
            let policies = if policy.is_empty() && samples.is_some() {
                vec![PolicyArg::AtInf, PolicyArg::Midpoint, PolicyArg::AtSup]
            } else {
                policy
            };
            let sweep = SnrSweep {
                start,
                stop,
                steps,
                beta,
                samples,
                policies: policies.into_iter().map(|p| (p, alpha)).collect(),
                seed,
            };
            let mut sink = open_sink(&output.out)?;
            commands::cmd_sweep_snr(
                &mut sink,
                &sweep,
                &QuadratureConfig::default(),
                output.format,
            )
        }
        Command::SweepAlpha {
            start,
            stop,
            steps,
            snr_db,
            beta,
            gains,
            samples,
            seed,
            output,
        } => {
            let sweep = AlphaSweep {
                start,
                stop,
                steps,
                snr_db,
                beta,
                gains,
                samples,
                seed,
            };
            let mut sink = open_sink(&output.out)?;
            commands::cmd_sweep_alpha(&mut sink, &sweep, output.format)
        }
        Command::Validate {
            samples,
            seed,
            output,
        } => {
            let checks = checks::run_checks(samples, seed)?;
            let mut sink = open_sink(&output.out)?;
            let all_pass = checks::write_report(&mut sink, &checks, output.format)?;
            if all_pass {
                Ok(())
            } else {
                Err(CliError::Failure("validation checks failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
