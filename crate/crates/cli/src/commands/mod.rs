use bonnet_core::report::VerificationReport;
use bonnet_core::Grid2D;

use crate::config::{Command, RunConfig};
use crate::CliError;

mod export;
mod family;
mod hyper;
mod reconstruct;
mod solve;
mod verify;

pub fn dispatch(config: &RunConfig) -> Result<bool, CliError> {
    match &config.command {
        Command::SolveSinhPoisson(a) => solve::run(config, a),
        Command::Reconstruct(a) => reconstruct::run(config, a),
        Command::VerifySurface(a) => verify::run(config, a),
        Command::AssociatedFamily(a) => family::run(config, a),
        Command::BuildHypersurface(a) => hyper::build(config, a),
        Command::Classify(a) => hyper::classify(config, a),
        Command::Export(a) => export::run(a),
    }
}

/// `--gate` when given, else 20 h².
fn residual_gate(config: &RunConfig, grid: &Grid2D) -> f64 {
    config.tolerances.gate.unwrap_or(20.0 * grid.h_max() * grid.h_max())
}

/// Report with the seed and the global tolerances in its provenance.
fn new_report(command: &str, config: &RunConfig) -> VerificationReport {
    let mut r = VerificationReport::new(command);
    r.provenance.seed = config.seed;
    if let Some(g) = config.tolerances.gate {
        r.tolerance("gate", g);
    }
    r
}

/// Largest |x| over values, NaN if any value is NaN.
fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m: f64, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x.abs()) })
}
