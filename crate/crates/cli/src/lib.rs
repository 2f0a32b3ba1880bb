//! The `bonnet` command line: validated configuration, dispatch to the
//! pipelines of `bonnet-core`, reports and exit codes.
//!
//! Exit codes: 0 when every gate passes, 1 when a gate fails (reports are
//! still written), 2 for configuration errors, 3 for computation errors.

use std::ffi::OsString;

use clap::Parser;

mod commands;
pub mod config;
pub mod hyperfile;
mod output;

pub use config::RunConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

/// Worker threads are capped by this variable.
pub const THREADS_VAR: &str = "BONNET_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] bonnet_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Compute(bonnet_core::Error::Gate { .. }) => EXIT_GATE,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    /// One-line JSON error record.
    pub fn record(&self) -> String {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Compute(bonnet_core::Error::Gate { .. }) => "gate",
            CliError::Compute(_) => "computation",
        };
        serde_json::json!({ "error": { "kind": kind, "exit_code": self.exit_code(), "message": self.to_string() } }).to_string()
    }
}

/// Validates and runs a parsed configuration; `Ok(pass)`.
pub fn run(config: &RunConfig) -> Result<bool, CliError> {
    config.validate()?;
    commands::dispatch(config)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
    // a second call in the same process keeps the existing pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = configure_threads().and_then(|_| run(&config));
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_GATE,
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}
