use clap::{Args, Parser, Subcommand};
use pmlbie_cli::config::RunConfig;
use pmlbie_cli::run::{run_diagnostics, run_solve, run_sweep};
use pmlbie_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Scattering by a locally perturbed periodic surface with a vertical PML.
#[derive(Parser)]
#[command(name = "pmlbie", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once: boundary_data.csv, field_grid.csv, diagnostics.json.
    Solve(Common),
    /// Sweep S or L: convergence.csv.
    Sweep(Common),
    /// Doubling diagnostics: riccati_residual.csv, lateral_decay.csv, spectral.json.
    Diag(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(c) => run_solve(&RunConfig::load(&c.config)?, &c.out, c.workers),
        Command::Sweep(c) => run_sweep(&RunConfig::load(&c.config)?, &c.out, c.workers),
        Command::Diag(c) => run_diagnostics(&RunConfig::load(&c.config)?, &c.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
