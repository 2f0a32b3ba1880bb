use bonnet_core::frame::{default_gate, reconstruct_surface, IntegrateOptions, ReconstructOptions, Sweep};
use bonnet_core::io::SurfaceFile;
use bonnet_core::mesh::obj_string;
use bonnet_core::{Error, Grid2D};

use super::{max_abs, new_report};
use crate::config::{parse_node, ReconstructArgs, RunConfig, SweepArg};
use crate::output::{finish, load_frame, load_nu, write_json, write_text};
use crate::CliError;

/// Node nearest to u = v = 0.
pub(super) fn origin_node(g: &Grid2D) -> (usize, usize) {
    let near = |lo: f64, h: f64, n: usize| (((-lo) / h).round().max(0.0) as usize).min(n - 1);
    (near(g.u_min(), g.hu(), g.nu()), near(g.v_min(), g.hv(), g.nv()))
}

pub fn run(config: &RunConfig, a: &ReconstructArgs) -> Result<bool, CliError> {
    let mut report = new_report("reconstruct", config);
    let nu = load_nu(&a.nu)?;
    report.add_input(&a.nu)?;
    let frame0 = load_frame(&a.frame0)?;
    if a.frame0 != "identity" {
        report.add_input(std::path::Path::new(&a.frame0))?;
    }
    let grid = *nu.grid();
    report.provenance.grid = Some(grid);
    let origin = match a.at.as_str() {
        "center" => grid.center(),
        "origin" => origin_node(&grid),
        s => parse_node(s)?,
    };
    if origin.0 >= grid.nu() || origin.1 >= grid.nv() {
        return Err(CliError::Config(format!(
            "initial node {origin:?} outside the {}x{} grid",
            grid.nu(),
            grid.nv()
        )));
    }
    let gate = config.tolerances.gate.unwrap_or_else(|| default_gate(&grid));
    report.tolerance("residual_gate", gate);
    report.tolerance("drift_limit", config.tolerances.drift_limit);
    let opts = ReconstructOptions {
        residual_gate: Some(gate),
        compatibility_gate: Some(gate),
        require_strong_regularity: !a.allow_weak,
        integrate: IntegrateOptions {
            sweep: match a.sweep {
                SweepArg::RowFirst => Sweep::RowFirst,
                SweepArg::ColumnFirst => Sweep::ColumnFirst,
            },
            drift_limit: config.tolerances.drift_limit,
        },
    };
    let rec = match reconstruct_surface(&nu, &frame0, Some(origin), &opts) {
        Ok(r) => r,
        Err(Error::Gate { name, value, gate }) => {
            report.gated(&name, value, None, gate);
            return finish(&report, a.report.as_deref());
        }
        Err(e) => return Err(e.into()),
    };
    write_json(&a.out, &SurfaceFile::new(&rec.surface, Some(&rec.frames)))?;
    if let Some(p) = &a.obj {
        write_text(p, &obj_string(rec.surface.l(), a.projection)?)?;
    }
    let w = rec.window;
    report.gated("sinh_poisson_residual", rec.sinh_poisson_residual, None, gate);
    report.gated("compatibility_residual", rec.compatibility_residual, None, gate);
    report.gated("gram_deviation", rec.frames.gram_deviation(), None, 1e-9);
    report.gated(
        "unit_length",
        max_abs(rec.surface.l().nodes().map(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0)),
        None,
        1e-9,
    );
    if a.allow_weak {
        report.info("strong_regularity_margin", rec.regularity_margin);
    } else {
        report.gated_min("strong_regularity_margin", rec.regularity_margin, 0.0);
    }
    report.info("max_drift", rec.frames.max_drift);
    report.info("certified_window_nodes", ((w.i_max - w.i_min + 1) * (w.j_max - w.j_min + 1)) as f64);
    finish(&report, a.report.as_deref())
}
