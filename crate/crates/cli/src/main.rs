mod cli;
mod config;
mod run;

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::Parser;
use doqf::Error;

use crate::cli::Cli;
use crate::config::{parse_config, RunConfig, Settings, UsageError};

/// Worker thread count; unset means one per available core.
const THREADS_VAR: &str = "DOQF_THREADS";

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::NoConvergence { .. } | Error::NoBracket { .. } | Error::Resolution(_) => EXIT_NUMERICAL,
        Error::Csv(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

fn setup() -> Result<RunConfig, UsageError> {
    let cli = Cli::parse();
    let file = match &cli.config {
        None => BTreeMap::new(),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text)?
        }
    };
    if let Some(v) = std::env::var_os(THREADS_VAR) {
        let n = v
            .to_str()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| UsageError(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| UsageError(format!("cannot start {n} worker threads: {e}")))?;
    }
    RunConfig::resolve(cli.command, &Settings::merge(&cli.options, file))
}

fn main() -> ExitCode {
    let cfg = match setup() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("doqf: error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run::run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("doqf: error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(exit_code(&Error::NoBracket { lo: 0.0, hi: 1.0 }), 3);
        assert_eq!(exit_code(&Error::Resolution("x".into())), 3);
        let nc = Error::NoConvergence { iterations: 1, grad_norm: 1.0, t1: 0.5, beta0: 0.5, value: 1.0 };
        assert_eq!(exit_code(&nc), 3);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 1);
    }
}
