//! `deltashock` command-line driver.
//!
//! Exit codes: 0 ok, 1 I/O or numerical failure, 2 invalid scenario or
//! arguments, 3 weak-form verification failed, 4 source unsupported by the
//! particle oracle. Errors go to standard error as one JSON object per line.

mod commands;
mod error;
mod scenario;

use clap::{Parser, ValueEnum};
use commands::{Options, Outcome};
use error::{exit, CliError};
use rayon::prelude::*;
use scenario::Scenario;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Front trajectory CSV.
    Solve,
    /// Figure panel and critical times as JSON.
    Classify,
    /// Characteristic fan CSV.
    Fan,
    /// Weak-form residual battery; exit 3 on failure.
    Verify,
    /// Sticky-particle comparison CSV and summary JSON.
    Oracle,
}

#[derive(Debug, Parser)]
#[command(version, about = "Delta-shock Riemann solver with discontinuous source terms")]
struct Cli {
    command: Command,
    /// Scenario JSON file, or a directory whose `*.json` files run in parallel.
    input: PathBuf,
    /// Output directory; files are named `<scenario>.<kind>.<ext>`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Integrator tolerance for general sources, in [1e-14, 1e-3].
    #[arg(long)]
    tol: Option<f64>,
    /// Shift the front by `A t` before verifying.
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    perturb_front: Option<f64>,
    /// Oracle particles per side.
    #[arg(long, default_value_t = commands::DEFAULT_PARTICLES)]
    n_particles: usize,
}

fn run_one(command: Command, path: &Path, opts: &Options) -> Result<Outcome, CliError> {
    let scenario = Scenario::load(path)?;
    match command {
        Command::Solve => commands::solve(&scenario, opts),
        Command::Classify => commands::classify(&scenario, opts),
        Command::Fan => commands::fan(&scenario, opts),
        Command::Verify => commands::verify(&scenario, opts),
        Command::Oracle => commands::oracle(&scenario, opts),
    }
}

fn scenario_files(input: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !input.is_dir() {
        return Ok(vec![input.to_path_buf()]);
    }
    let entries =
        std::fs::read_dir(input).map_err(|e| CliError::io(format!("cannot read {}: {e}", input.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::validation(
            "NoScenarios",
            format!("no *.json files in {}", input.display()),
        ));
    }
    Ok(files)
}

fn check_options(cli: &Cli) -> Result<(), CliError> {
    if let Some(tol) = cli.tol {
        if !(1e-14..=1e-3).contains(&tol) {
            return Err(CliError::validation(
                "InvalidTolerance",
                format!("tolerance {tol} outside [1e-14, 1e-3]"),
            ));
        }
    }
    if let Some(a) = cli.perturb_front {
        if !a.is_finite() {
            return Err(CliError::validation(
                "InvalidArgument",
                "--perturb-front must be finite",
            ));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let input_name = cli.input.display().to_string();
    let files = match check_options(&cli).and_then(|()| scenario_files(&cli.input)) {
        Ok(files) => files,
        Err(e) => {
            eprintln!("{}", e.to_json(&input_name));
            return ExitCode::from(e.exit_code as u8);
        }
    };
    let opts = Options {
        out: cli.out.clone(),
        tol: cli.tol,
        perturb_front: cli.perturb_front,
        n_particles: cli.n_particles,
    };
    let batch = cli.input.is_dir();
    let results: Vec<(String, Result<Outcome, CliError>)> = files
        .par_iter()
        .map(|path| (scenario::stem(path), run_one(cli.command, path, &opts)))
        .collect();

    let mut code = exit::OK;
    for (name, result) in results {
        match result {
            Ok(outcome) if batch => println!("{name}: {}", outcome.summary),
            Ok(outcome) => println!("{}", outcome.summary),
            Err(e) => {
                eprintln!("{}", e.to_json(&name));
                code = code.max(e.exit_code);
            }
        }
    }
    ExitCode::from(code as u8)
}
