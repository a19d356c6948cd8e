mod args;
mod commands;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Validation failure detected by the CLI itself.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 1;
        }
        if cause.is::<commands::Mismatch>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<segc_core::Error>() {
            return match e.kind() {
                segc_core::ErrorKind::Io => 2,
                segc_core::ErrorKind::Invalid => 1,
                segc_core::ErrorKind::Numeric => 3,
            };
        }
        if cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { 2 } else { 1 };
        }
        if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            return if e.is_io() { 2 } else { 1 };
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build()?;
    pool.install(|| match cli.command {
        Command::Complexity(a) => commands::complexity(a),
        Command::Degrade(a) => commands::degrade(a),
        Command::Fit(a) => commands::fit(a),
        Command::Advise(a) => commands::advise(a),
        Command::Reproduce(a) => commands::reproduce(a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
