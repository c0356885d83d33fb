use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stable_agg_cli::{commands, CliError, Flags, RunConfig};

/// Temporal aggregation of stable moving-average processes: aggregated
/// laws, log quantile difference curves, region maps and Monte Carlo checks.
#[derive(Parser)]
#[command(name = "stable-agg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Stable law of the aggregated process for each --r (JSON lines).
    Aggregate,
    /// Closed-form LQD, slope and curvature against ln r (CSV).
    LqdCurve,
    /// Sign of g_alpha over the MA(2) plane plus the zero curve (CSV).
    RegionMap,
    /// Monte Carlo verification runs (JSON lines); exit 2 if any fail.
    Verify,
    /// Sub-region, conditions, g_alpha and curve shape of one model (JSON).
    Classify,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("STABLE_AGG_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        value.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            CliError::Validation(format!("STABLE_AGG_THREADS must be a positive integer, got {value:?}"))
        })?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| CliError::Validation(e.to_string()))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| CliError::Validation(format!("cannot write output: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = RunConfig::load(&cli.flags)?;
    let result = match cli.command {
        Command::Aggregate => commands::aggregate(&cfg),
        Command::LqdCurve => commands::lqd_curve(&cfg),
        Command::RegionMap => commands::region_map(&cfg),
        Command::Verify => commands::verify_suite(&cfg),
        Command::Classify => commands::classify(&cfg),
    };
    match result {
        Ok(text) => emit(&cfg, &text),
        Err(CliError::VerificationFailed { failed, total, output }) => {
            // failing reports are still written out
            emit(&cfg, &output)?;
            Err(CliError::VerificationFailed { failed, total, output: String::new() })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage problems are validation errors; exit 2 means a failed run
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
