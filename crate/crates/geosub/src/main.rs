//! Command-line surface: dataset generation, solving, verification, and
//! benchmarking with JSON/CSV reporting.
//!
//! Exit codes: 0 success, 1 error, 2 principled refusal (budget exceeded or
//! infeasible instance).

mod bench;
mod generate;
mod solve;
mod verify;

use clap::{Parser, Subcommand};
use geo_sublinear::Error as GeoError;

#[derive(Parser)]
#[command(
    name = "geosub",
    version,
    about = "Sublinear enclosing-problem solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with planted ground truth.
    Generate(generate::GenerateArgs),
    /// Solve an instance and print a JSON report to stdout.
    Solve(solve::SolveArgs),
    /// Re-check a report against its dataset (and planted truth, if any).
    Verify(verify::VerifyArgs),
    /// Parameter sweeps with per-run counters, one CSV row per trial.
    Bench(bench::BenchArgs),
}

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            e.exit();
        }
        e.print().ok();
        std::process::exit(1);
    });
    let result = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Solve(args) => solve::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let refusal = err.downcast_ref::<GeoError>().is_some_and(|e| {
                matches!(e, GeoError::BudgetExceeded(_) | GeoError::Infeasible(_))
            });
            std::process::exit(if refusal { 2 } else { 1 });
        }
    }
}
