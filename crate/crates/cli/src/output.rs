use std::path::{Path, PathBuf};

use bonnet_core::frame::Mat4;
use bonnet_core::io::{FieldFile, SurfaceFile};
use bonnet_core::report::VerificationReport;
use bonnet_core::sinh_poisson::NormalCurvatureField;
use serde::de::DeserializeOwned;

use crate::CliError;

/// Parses a JSON input; unreadable or malformed files are configuration errors.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed JSON in {}: {e}", path.display())))
}

/// ν from a field file holding either ν or f = ln ν.
pub fn load_nu(path: &Path) -> Result<NormalCurvatureField, CliError> {
    let file: FieldFile = load_json(path)?;
    let field = file.field().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match file.quantity.as_str() {
        "nu" => Ok(NormalCurvatureField::new(field)?),
        "f" => Ok(NormalCurvatureField::from_log(&field)?),
        q => Err(CliError::Config(format!("{}: quantity '{q}' is neither 'nu' nor 'f'", path.display()))),
    }
}

pub fn load_surface(path: &Path) -> Result<SurfaceFile, CliError> {
    let file: SurfaceFile = load_json(path)?;
    if file.l.len() != file.grid.len() {
        return Err(CliError::Config(format!(
            "{}: {} positions for a grid of {} nodes",
            path.display(),
            file.l.len(),
            file.grid.len()
        )));
    }
    Ok(file)
}

/// `identity` or a JSON array of four rows.
pub fn load_frame(spec: &str) -> Result<Mat4, CliError> {
    if spec == "identity" {
        return Ok(Mat4::identity());
    }
    let rows: [[f64; 4]; 4] = load_json(Path::new(spec))?;
    Ok(Mat4::from_fn(|r, c| rows[r][c]))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Compute(e.into()))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    Ok(bonnet_core::io::write_json(path, value)?)
}

/// JSON and CSV paths of a report: `path` keeps its own extension when it is
/// one of the two, and the other file shares its stem.
fn report_paths(path: &Path) -> (PathBuf, PathBuf) {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => (path.with_extension("json"), path.to_path_buf()),
        Some("json") => (path.to_path_buf(), path.with_extension("csv")),
        _ => (path.with_extension("json"), path.with_extension("csv")),
    }
}

pub fn write_report(report: &VerificationReport, path: &Path) -> Result<(), CliError> {
    let (json, csv) = report_paths(path);
    write_json(&json, report)?;
    write_text(&csv, &report.csv())
}

/// One line per check on stdout, then the overall verdict.
pub fn print_report(report: &VerificationReport) {
    for c in &report.checks {
        let verdict = match (c.gate, c.pass) {
            (None, _) => "INFO",
            (Some(_), true) => "PASS",
            (Some(_), false) => "FAIL",
        };
        match c.gate {
            Some(g) if c.lower_bound => println!("{verdict} {} min {:.3e} > {:.3e}", c.name, c.max, g),
            Some(g) => println!("{verdict} {} max {:.3e} < {:.3e}", c.name, c.max, g),
            None => println!("{verdict} {} {:.6e}", c.name, c.max),
        }
    }
    println!("{} {}", report.command, if report.pass { "passed" } else { "failed" });
}

/// Prints the report and writes it when a path is given.
pub fn finish(report: &VerificationReport, path: Option<&Path>) -> Result<bool, CliError> {
    if let Some(p) = path {
        write_report(report, p)?;
    }
    print_report(report);
    Ok(report.pass)
}
