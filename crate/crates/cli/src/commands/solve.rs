use std::f64::consts::PI;
use std::path::Path;

use bonnet_core::fixtures::PlaneWave;
use bonnet_core::frame::{certified_window, ReconstructOptions};
use bonnet_core::io::FieldFile;
use bonnet_core::sinh_poisson::{dirichlet_from_fn, solve, SolveOptions};
use bonnet_core::{Error, ScalarField};

use super::{new_report, residual_gate};
use crate::config::{is_boundary_preset, parse_grid, RunConfig, SolveArgs};
use crate::output::{finish, load_nu, write_json, write_text};
use crate::CliError;

fn preset(name: &str) -> Result<Box<dyn Fn(f64, f64) -> f64>, CliError> {
    Ok(match name {
        "zero" => Box::new(|_, _| 0.0),
        "bump" => Box::new(|u, v| 0.1 * (PI * u).sin() * (PI * v).sin()),
        "plane-wave" => {
            let w = PlaneWave::standard();
            Box::new(move |u, v| w.f(u, v))
        }
        s => {
            let c: f64 = s
                .strip_prefix("const:")
                .and_then(|c| c.parse().ok())
                .filter(|c: &f64| c.is_finite())
                .ok_or_else(|| CliError::Config(format!("unknown boundary preset '{s}'")))?;
            Box::new(move |_, _| c)
        }
    })
}

pub fn run(config: &RunConfig, a: &SolveArgs) -> Result<bool, CliError> {
    let mut report = new_report("solve-sinh-poisson", config);
    let boundary = if is_boundary_preset(&a.boundary) {
        let grid = parse_grid(a.grid.as_deref().unwrap_or_default())?;
        dirichlet_from_fn(grid, preset(&a.boundary)?)?
    } else {
        let path = Path::new(&a.boundary);
        let f = load_nu(path)?.log();
        if let Some(g) = &a.grid {
            if parse_grid(g)? != *f.grid() {
                return Err(CliError::Config("--grid differs from the grid of the boundary file".into()));
            }
        }
        report.add_input(path)?;
        f
    };
    let grid = *boundary.grid();
    report.provenance.grid = Some(grid);
    report.tolerance("tol", a.tol);
    report.tolerance("max_iters", a.max_iters as f64);
    let opts = SolveOptions {
        tol: a.tol,
        max_iters: a.max_iters,
        ..SolveOptions::default()
    };
    let guess = ScalarField::constant(grid, a.guess);
    let sol = match solve(&boundary, &guess, &opts) {
        Ok(s) => s,
        Err(Error::NotConverged(s)) => *s,
        Err(e) => return Err(e.into()),
    };
    let nu = sol.nu()?;
    write_json(&a.out, &FieldFile::new("nu", nu.field()))?;
    if let Some(h) = &a.history {
        write_text(h, &sol.history_csv())?;
    }
    report.gated("residual_inf", sol.residual_inf, None, a.tol);
    report.flag("converged", sol.converged);
    report.info("iterations", sol.iterations as f64);
    if let Some(c) = sol.quadratic_constant() {
        report.info("quadratic_constant", c);
    }
    let gate = residual_gate(config, &grid);
    let ropts = ReconstructOptions {
        residual_gate: Some(gate),
        compatibility_gate: Some(gate),
        ..ReconstructOptions::default()
    };
    match certified_window(&nu, &ropts)? {
        Some(w) => {
            report.info("certified_window_nodes", ((w.i_max - w.i_min + 1) * (w.j_max - w.j_min + 1)) as f64);
            report.info("strong_regularity_margin", bonnet_core::sinh_poisson::certify_strong_regularity(&nu, &w)?);
        }
        None => report.info("certified_window_nodes", 0.0),
    }
    finish(&report, a.report.as_deref())
}
