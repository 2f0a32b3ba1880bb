use bonnet_core::grid::MaskedField;
use bonnet_core::surface::{codazzi_residual, fundamental_forms, fundamental_forms_with_normal, gauss_residual, invariants_from_forms, InvariantOptions};
use bonnet_core::{ScalarField, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_abs, new_report, residual_gate};
use crate::config::{RunConfig, VerifyArgs};
use crate::output::{finish, load_surface};
use crate::CliError;

/// N' = cos δ N + sin δ l with δ = a (1 + s u + t v).
fn perturbed(n: &VectorField, l: &VectorField, amplitude: f64, (s, t): (f64, f64)) -> Result<VectorField, CliError> {
    let g = *n.grid();
    let mut data = Vec::with_capacity(g.len() * 4);
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        let (u, v) = g.coords(i, j);
        let (sd, cd) = (amplitude * (1.0 + s * u + t * v)).sin_cos();
        data.extend((0..4).map(|c| cd * n.at_index(k)[c] + sd * l.at_index(k)[c]));
    }
    Ok(VectorField::new(g, 4, data)?)
}

pub fn run(config: &RunConfig, a: &VerifyArgs) -> Result<bool, CliError> {
    let mut report = new_report("verify-surface", config);
    let file = load_surface(&a.input)?;
    report.add_input(&a.input)?;
    let surface = file.surface()?;
    let grid = *surface.grid();
    report.provenance.grid = Some(grid);
    let gate = residual_gate(config, &grid);
    report.tolerance("residual_gate", gate);
    report.tolerance("principal_tol", a.principal_tol);
    let mut forms = fundamental_forms(&surface)?;
    if let Some(stored) = file.normal()? {
        let dev = (0..grid.len()).map(|k| {
            let (x, y) = (stored.at_index(k), forms.normal.at_index(k));
            let d = |sign: f64| (0..4).map(|c| (x[c] - sign * y[c]).powi(2)).sum::<f64>().sqrt();
            d(1.0).min(d(-1.0))
        });
        report.info("stored_normal_deviation", max_abs(dev));
    }
    if let Some(amp) = a.perturb_normal {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
        let st = (rng.random_range(0.5..1.0), rng.random_range(0.5..1.0));
        report.tolerance("perturb_normal", amp);
        let n = perturbed(&forms.normal, surface.l(), amp, st)?;
        forms = fundamental_forms_with_normal(&surface, &n)?;
    }
    let inv = invariants_from_forms(
        forms,
        &InvariantOptions {
            principal_tol: f64::INFINITY,
            ..InvariantOptions::default()
        },
    )?;
    let unit = max_abs(surface.l().nodes().map(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0));
    report.gated("unit_length", unit, None, 1e-8);
    report.gated("principal_defect", inv.principal_defect, None, a.principal_tol);
    let (c1, c2) = codazzi_residual(&inv)?;
    let gauss = gauss_residual(&inv)?;
    for (name, r) in [("codazzi_1", &c1), ("codazzi_2", &c2), ("gauss", &gauss)] {
        report.gated(name, r.max_abs(), Some(r.mean_abs()), gate);
    }
    let k_diff = inv.intrinsic_curvature.zip_map(&inv.gauss_curvature, |a, b| a - b)?;
    let k_diff = MaskedField::with_margin(k_diff, 2);
    report.gated("curvature_consistency", k_diff.max_abs(), Some(k_diff.mean_abs()), gate);
    let interior = |f: &ScalarField| MaskedField::interior(f.clone());
    report.info("max_abs_mean_curvature", interior(&inv.mean_curvature).max_abs());
    report.info("max_abs_gauss_curvature", interior(&inv.gauss_curvature).max_abs());
    finish(&report, a.report.as_deref())
}
