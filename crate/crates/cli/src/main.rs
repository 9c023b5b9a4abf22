//! Experiment front end: dataset statistics, Gram matrix computation,
//! cross-validated classification, and a self-check suite.
//!
//! Exit codes: 0 success, 1 internal failure, 2 usage or input error.

mod common;
mod cv;
mod gram;
mod oracle;
mod stats;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mwsp_core::Error;

#[derive(Parser)]
#[command(
    name = "mwsp",
    version,
    about = "Multi-scale Wasserstein shortest-path graph kernels"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset statistics as an aligned row and as JSON
    Stats(stats::StatsArgs),
    /// Compute a kernel matrix and write it as CSV with a JSON sidecar
    Gram(gram::GramArgs),
    /// Run repeated stratified cross-validation and write a JSON report
    Cv(cv::CvArgs),
    /// Run the desk-scale verification suite on synthetic inputs
    Oracle(oracle::OracleArgs),
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::MissingFile(_)
        | Error::Parse { .. }
        | Error::Integrity { .. }
        | Error::NodeIndex { .. }
        | Error::Precondition(_)
        | Error::InvalidInput(_)
        | Error::Io(_) => 2,
        Error::Dimension(_) | Error::Arity(_) | Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: could not configure {jobs} worker threads: {err}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Stats(args) => stats::run(args),
        Command::Gram(args) => gram::run(args),
        Command::Cv(args) => cv::run(args),
        Command::Oracle(args) => oracle::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
