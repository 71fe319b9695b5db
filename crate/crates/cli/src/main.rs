mod args;
mod commands;
mod handles;
mod io;

use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "facies-qc", version, about = "Condition facies generators to well data and check realization ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw unconditional realizations.
    Generate(commands::generate::Args),
    /// Condition realizations to well data.
    Condition(commands::condition::Args),
    /// Run the check suite on an ensemble against a training image.
    Check(commands::check::Args),
    /// Sweep the number of conditioning points and compare with unconditional realizations.
    Experiment(commands::experiment::Args),
    /// Print the JSON schema of the check report.
    Schema,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("FACIES_QC_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().with_context(|| format!("FACIES_QC_THREADS={value:?} is not a count"))?;
    if n == 0 {
        bail!("FACIES_QC_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("cannot configure the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Generate(a) => commands::generate::run(a),
        Command::Condition(a) => commands::condition::run(a),
        Command::Check(a) => commands::check::run(a),
        Command::Experiment(a) => commands::experiment::run(a),
        Command::Schema => {
            print!("{}", commands::check::REPORT_SCHEMA);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap renders several lines; keep the message up to the usage block on one line
            let msg = e.to_string();
            let line: Vec<&str> = msg
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
                .collect();
            eprintln!("facies-qc: usage error: {}", line.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("facies-qc: error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
