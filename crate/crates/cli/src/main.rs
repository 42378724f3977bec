//! `ompath`: most probable paths of scalar jump-diffusions from the command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 no solution in the
//! shooting bracket, 4 numerical failure. Errors are printed to stderr as JSON.

mod args;
mod commands;
mod config;
mod failure;
mod output;
mod reproduce;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use failure::{Failure, EXIT_CONFIG};

fn init_jobs(flag: Option<usize>) -> Result<(), Failure> {
    let jobs = match flag {
        Some(j) => Some(j),
        None => match std::env::var("OMPATH_JOBS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| Failure::config(format!("OMPATH_JOBS = `{v}` is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::config("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::config(e.to_string().trim_end().to_string());
            eprintln!("{}", f.to_json());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let result = init_jobs(cli.jobs).and_then(|()| commands::run(&cli));
    match result {
        Ok(summary) => {
            // a closed stdout (e.g. piped into `head`) is not an error
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code as u8)
        }
    }
}
