use std::f64::consts::PI;

use bonnet_core::family::{build_family, verify_isometry, IsometryReport};
use bonnet_core::frame::{IntegrateOptions, ReconstructOptions};
use bonnet_core::io::SurfaceFile;

use super::new_report;
use crate::config::{FamilyArgs, RunConfig};
use crate::output::{finish, load_frame, load_nu, write_json, write_text};
use crate::CliError;

pub fn run(config: &RunConfig, a: &FamilyArgs) -> Result<bool, CliError> {
    let mut report = new_report("associated-family", config);
    let nu = load_nu(&a.nu)?;
    report.add_input(&a.nu)?;
    let frame0 = load_frame(&a.frame0)?;
    report.provenance.grid = Some(*nu.grid());
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::Config(format!("cannot create {}: {e}", a.out.display())))?;
    let ts: Vec<f64> = (0..a.angles).map(|k| 2.0 * PI * k as f64 / a.angles as f64).collect();
    let opts = ReconstructOptions {
        residual_gate: config.tolerances.gate,
        compatibility_gate: config.tolerances.gate,
        integrate: IntegrateOptions {
            drift_limit: config.tolerances.drift_limit,
            ..IntegrateOptions::default()
        },
        ..ReconstructOptions::default()
    };
    let family = build_family(&nu, &ts, &frame0, a.radius, &opts)?;
    let mut csv = String::from(IsometryReport::csv_header());
    csv.push('\n');
    for (k, m) in family.members.iter().enumerate() {
        let idx = ts.iter().position(|&t| t == m.t).unwrap_or(k);
        write_json(&a.out.join(format!("member_{idx:02}.json")), &SurfaceFile::new(&m.surface, None))?;
        let mut iso = verify_isometry(&family.base, m)?;
        if let Some(g) = config.tolerances.gate {
            iso.gate = g;
            iso.pass = iso.e_deviation < g && iso.g_deviation < g && iso.f_max < g && iso.canonical_deviation < g;
        }
        csv.push_str(&iso.csv_row());
        csv.push('\n');
        let name = |q: &str| format!("member_{idx:02}.{q}");
        report.gated(&name("e_deviation"), iso.e_deviation, None, iso.gate);
        report.gated(&name("g_deviation"), iso.g_deviation, None, iso.gate);
        report.gated(&name("f_max"), iso.f_max, None, iso.gate);
        report.gated(&name("canonical_deviation"), iso.canonical_deviation, None, iso.gate);
        report.info(&name("curvature_deviation"), iso.curvature_deviation);
        report.info(&name("sinh_poisson_residual"), m.residual);
    }
    for (t, reason) in &family.failures {
        let idx = ts.iter().position(|x| x == t).unwrap_or(0);
        eprintln!("member {idx} (t = {t}) failed: {reason}");
        report.flag(&format!("member_{idx:02}.reconstructed"), false);
    }
    write_text(&a.out.join("isometry_report.csv"), &csv)?;
    finish(&report, Some(&a.out.join("report.json")))
}
