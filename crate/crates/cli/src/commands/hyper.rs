use bonnet_core::hypersurface::{
    biumbilical_system_residual, connection_scalars, extract_chart, fit_sphere, integral_surface_check, minimal_system_residual, normal_constancy,
    Classification, ConnectionOptions, HypersurfaceMap, SpectrumOptions,
};
use bonnet_core::{Grid2D, VectorField};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{max_abs, new_report, residual_gate};
use crate::config::{parse_domain, BuildArgs, ClassifyArgs, Kind, RunConfig};
use crate::hyperfile::{default_domain, default_fixture, ChartData, HyperFile, Source};
use crate::output::{finish, load_json, load_surface, write_json, write_text};
use crate::CliError;

/// Largest conformality defect accepted by the envelope residual systems.
const CONFORMAL_TOL: f64 = 1e-3;
/// Gate on the spread of the normal along a generator.
const NORMAL_CONSTANCY_GATE: f64 = 1e-8;
/// Relative gate on the radius of the integral sphere.
const SPHERE_RADIUS_GATE: f64 = 0.01;
/// Gate on |κ₁ − κ₂|, |trace A| and σ at sampled points.
const SAMPLE_GATE: f64 = 1e-5;
/// Floor on |κ| at bi-umbilical sample points.
const KAPPA_FLOOR: f64 = 1e-3;

fn options(config: &RunConfig) -> ConnectionOptions {
    ConnectionOptions {
        spectrum: SpectrumOptions {
            tau: config.tolerances.spectral_tol,
            ..SpectrumOptions::default()
        },
        ..ConnectionOptions::default()
    }
}

fn at_w(n: usize, u: f64, v: f64, w: f64) -> Vec<f64> {
    let mut p = vec![w; n];
    p[0] = u;
    p[1] = v;
    p
}

/// Points X(u, v, w, …, w) on the nodes of `grid`.
pub(super) fn slice(map: &dyn HypersurfaceMap, grid: &Grid2D, w: f64) -> Vec<DVector<f64>> {
    (0..grid.len())
        .map(|k| {
            let (i, j) = grid.node(k);
            let (u, v) = grid.coords(i, j);
            map.eval(&at_w(map.n(), u, v, w))
        })
        .collect()
}

pub fn build(config: &RunConfig, a: &BuildArgs) -> Result<bool, CliError> {
    let mut report = new_report("build-hypersurface", config);
    let source = match &a.input {
        Some(p) => {
            report.add_input(p)?;
            Source::Surface { surface: load_surface(p)? }
        }
        None => Source::Fixture {
            name: a.fixture.unwrap_or_else(|| default_fixture(a.kind)),
            radius: a.radius,
        },
    };
    let domain = match &a.domain {
        Some(d) => parse_domain(d)?,
        None => default_domain(&source),
    };
    let [u0, u1, v0, v1] = domain;
    let mut hf = HyperFile {
        kind: a.kind,
        n: a.n,
        source,
        alpha: a.alpha,
        domain,
        base: [0.5 * (u0 + u1), 0.5 * (v0 + v1)],
        w_range: a.w_range,
        mean_tol: a.mean_tol,
        chart: None,
    };
    let map = hf.map()?;
    let grid = Grid2D::new(u0, u1, a.chart_nodes, v0, v1, a.chart_nodes)?;
    report.provenance.grid = Some(grid);
    let base = grid.center();
    let chart = extract_chart(map.as_ref(), grid, base)?;
    let gate = residual_gate(config, &grid);
    report.tolerance("residual_gate", gate);
    report.tolerance("conformal_tol", CONFORMAL_TOL);
    report.tolerance("spectral_tol", config.tolerances.spectral_tol);
    report.info("conformality_defect", chart.conformality_defect());
    report.gated("basis_defect", chart.basis_defect(), None, 1e-8);
    let opts = options(config);
    let conn = connection_scalars(map.as_ref(), &at_w(a.n, hf.base[0], hf.base[1], 0.0), &opts)?;
    report.gated("sigma", max_abs(conn.sigma.iter().copied()), None, SAMPLE_GATE);
    report.info("gamma1", conn.gamma1);
    report.info("gamma2", conn.gamma2);
    match a.kind {
        Kind::Biumbilical => {
            let names = ["l_wave", "l_mixed", "r_wave", "r_mixed"];
            for (name, r) in names.iter().zip(biumbilical_system_residual(&chart, CONFORMAL_TOL)?) {
                report.gated(&format!("biumbilical_system.{name}"), r.max_abs(), Some(r.mean_abs()), gate);
            }
            let ws = [vec![a.w_range; a.n - 2], vec![-a.w_range; a.n - 2]];
            let spread = normal_constancy(map.as_ref(), (hf.base[0], hf.base[1]), &ws, opts.spectrum.step)?;
            report.gated("normal_constancy", spread, None, NORMAL_CONSTANCY_GATE);
            let kappa = conn.kappa.0.abs().max(conn.kappa.1.abs());
            let c2: f64 = conn.lambda.iter().map(|x| x * x).sum();
            let predicted = 1.0 / (c2 + kappa * kappa).sqrt();
            report.info("lambda_mu_gap", max_abs(conn.lambda.iter().zip(&conn.mu).map(|(l, m)| l - m)));
            report.info("predicted_sphere_radius", predicted);
            let fit = fit_sphere(&slice(map.as_ref(), &grid, 0.0))?;
            report.info("fitted_sphere_radius", fit.radius);
            report.gated(
                "sphere_radius_relative_error",
                (fit.radius - predicted).abs() / predicted,
                None,
                SPHERE_RADIUS_GATE,
            );
        }
        Kind::MinimalR3 | Kind::MinimalS3 => {
            let names = ["l_harmonic", "r_harmonic"];
            for (name, r) in names.iter().zip(minimal_system_residual(&chart, CONFORMAL_TOL)?) {
                report.gated(&format!("minimal_system.{name}"), r.max_abs(), Some(r.mean_abs()), gate);
            }
            let nodes: Vec<Vec<f64>> = slice(map.as_ref(), &grid, 0.0).iter().map(|x| x.as_slice().to_vec()).collect();
            let points = VectorField::from_nodes(grid, a.n + 1, &nodes)?;
            let check = integral_surface_check(&points)?;
            report.info("integral_surface_affine_dim", check.affine_dim as f64);
            report.gated("integral_surface_mean_curvature", check.mean_curvature, None, gate);
        }
    }
    hf.chart = Some(ChartData::from_chart(&chart, base));
    write_json(&a.out, &hf)?;
    finish(&report, a.report.as_deref())
}

struct Sample {
    p: Vec<f64>,
    eigenvalues: Vec<f64>,
    type_number: usize,
    classification: Classification,
    sigma: f64,
}

pub fn classify(config: &RunConfig, a: &ClassifyArgs) -> Result<bool, CliError> {
    let mut report = new_report("classify", config);
    let hf: HyperFile = load_json(&a.input)?;
    report.add_input(&a.input)?;
    report.tolerance("spectral_tol", config.tolerances.spectral_tol);
    report.tolerance("sample_gate", SAMPLE_GATE);
    let map = hf.map()?;
    let [u0, u1, v0, v1] = hf.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0));
    let points: Vec<Vec<f64>> = (0..a.samples)
        .map(|_| {
            let mut p = vec![u0 + (u1 - u0) * rng.random_range(0.1..0.9), v0 + (v1 - v0) * rng.random_range(0.1..0.9)];
            p.extend((2..hf.n).map(|_| hf.w_range * rng.random_range(-1.0..1.0)));
            p
        })
        .collect();
    let opts = options(config);
    let samples: Vec<Sample> = points
        .into_par_iter()
        .map(|p| -> Result<Sample, CliError> {
            let s = bonnet_core::hypersurface::shape_spectrum(map.as_ref(), &p, &opts.spectrum)?;
            let sigma = match connection_scalars(map.as_ref(), &p, &opts) {
                Ok(c) => max_abs(c.sigma),
                Err(_) => f64::NAN,
            };
            Ok(Sample {
                eigenvalues: s.eigenvalues.clone(),
                type_number: s.type_number,
                classification: s.classification,
                sigma,
                p,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut csv = String::from("u,v,w_norm");
    for k in 1..=hf.n {
        csv.push_str(&format!(",kappa_{k}"));
    }
    csv.push_str(",type_number,classification\n");
    for s in &samples {
        let w_norm = s.p[2..].iter().map(|w| w * w).sum::<f64>().sqrt();
        csv.push_str(&format!("{},{},{}", s.p[0], s.p[1], w_norm));
        for e in &s.eigenvalues {
            csv.push_str(&format!(",{e}"));
        }
        csv.push_str(&format!(",{},{}\n", s.type_number, s.classification.as_str()));
    }
    write_text(&a.report, &csv)?;
    let expected = match hf.kind {
        Kind::Biumbilical => Classification::BiUmbilical,
        Kind::MinimalR3 | Kind::MinimalS3 => Classification::TypeTwo,
    };
    let wrong = samples.iter().filter(|s| s.classification != expected).count();
    report.gated(&format!("not_{}", expected.as_str()), wrong as f64, None, 0.5);
    let null = max_abs(samples.iter().map(|s| {
        let mut abs: Vec<f64> = s.eigenvalues.iter().map(|e| e.abs()).collect();
        abs.sort_by(f64::total_cmp);
        abs[..abs.len() - 2].iter().copied().fold(0.0, f64::max)
    }));
    report.gated("null_eigenvalues", null, None, config.tolerances.spectral_tol);
    let pair = |s: &Sample| {
        let mut e = s.eigenvalues.clone();
        e.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        (e[0], e[1])
    };
    match hf.kind {
        Kind::Biumbilical => {
            report.gated("principal_gap", max_abs(samples.iter().map(|s| pair(s).0 - pair(s).1)), None, SAMPLE_GATE);
            let floor = samples.iter().map(|s| pair(s).1.abs()).fold(f64::INFINITY, f64::min);
            report.gated_min("min_abs_kappa", floor, KAPPA_FLOOR);
        }
        Kind::MinimalR3 | Kind::MinimalS3 => {
            // an interpolated discrete surface is minimal only to its own O(h²)
            let gate = match &hf.source {
                Source::Surface { surface } => SAMPLE_GATE.max(20.0 * surface.grid.h_max().powi(2)),
                Source::Fixture { .. } => SAMPLE_GATE,
            };
            report.gated("trace", max_abs(samples.iter().map(|s| s.eigenvalues.iter().sum::<f64>())), None, gate);
        }
    }
    report.gated("sigma", max_abs(samples.iter().map(|s| s.sigma)), None, SAMPLE_GATE);
    finish(&report, a.summary.as_deref())
}
