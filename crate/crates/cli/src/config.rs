//! Command-line configuration and its validation.

use std::path::{Path, PathBuf};

use bonnet_core::mesh::Projection;
use bonnet_core::Grid2D;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bonnet",
    version,
    about = "Minimal surfaces in S^3 from the sinh-Poisson equation, and type-number-two hypersurfaces"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub tolerances: Tolerances,
    /// Seed for randomized sampling and negative controls.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// Overrides of the default gates.
#[derive(Debug, Clone, Copy, Args)]
pub struct Tolerances {
    /// Residual gate; the default is 20 h² of the grid in use.
    #[arg(long, global = true)]
    pub gate: Option<f64>,
    /// Eigenvalues with |kappa| at or below this count as zero.
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub spectral_tol: f64,
    /// Per-step orthonormality drift that aborts frame integration.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub drift_limit: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve Δf + 4 sinh f = 0 with Dirichlet data and write ν = e^f.
    SolveSinhPoisson(SolveArgs),
    /// Integrate the frame system of a ν field and write the surface.
    Reconstruct(ReconstructArgs),
    /// Measure invariants of a surface and gate its Gauss and Codazzi residuals.
    VerifySurface(VerifyArgs),
    /// Build and compare the isometric family of rotated ν fields.
    AssociatedFamily(FamilyArgs),
    /// Build a type-number-two hypersurface and its envelope chart.
    BuildHypersurface(BuildArgs),
    /// Sample shape-operator spectra of a hypersurface.
    Classify(ClassifyArgs),
    /// Write a surface or a hypersurface slice as a Wavefront OBJ mesh.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// `u_min,u_max,nu,v_min,v_max,nv`, or `lo,hi,n` for a square; required unless the boundary is a file.
    #[arg(long)]
    pub grid: Option<String>,
    /// Dirichlet data: a field file, or one of zero, bump, plane-wave, const:<c>.
    #[arg(long, default_value = "zero")]
    pub boundary: String,
    /// Constant initial guess for f at interior nodes.
    #[arg(long, default_value_t = 0.0)]
    pub guess: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 30)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Residual history CSV (iter, residual_inf, step_size).
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    RowFirst,
    ColumnFirst,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// Field file holding ν (quantity "nu") or f = ln ν (quantity "f").
    #[arg(long)]
    pub nu: PathBuf,
    /// `identity`, or a JSON file with the 4×4 initial frame as rows (X, Y, N, l).
    #[arg(long, default_value = "identity")]
    pub frame0: String,
    /// Node of the initial frame: `center`, `origin` (nearest to u = v = 0) or `i,j`.
    #[arg(long, default_value = "center")]
    pub at: String,
    #[arg(long, value_enum, default_value_t = SweepArg::RowFirst)]
    pub sweep: SweepArg,
    /// Skip the ν_u ν_v ≠ 0 gate.
    #[arg(long)]
    pub allow_weak: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the surface as an OBJ mesh.
    #[arg(long)]
    pub obj: Option<PathBuf>,
    #[arg(long, value_parser = parse_projection, default_value = "stereographic")]
    pub projection: Projection,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Principal-net tolerance on max(|F|/√(EG), |f|/√|eg|).
    #[arg(long, default_value_t = 1e-4)]
    pub principal_tol: f64,
    /// Negative control: rotate N towards l by δ = a (1 + s u + t v), s, t drawn from the seed.
    #[arg(long)]
    pub perturb_normal: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub nu: PathBuf,
    /// Number of angles t_k = 2πk/angles.
    #[arg(long, default_value_t = 8)]
    pub angles: usize,
    /// Disc about the parameter origin containing every member; the largest one in the grid by default.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value = "identity")]
    pub frame0: String,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Biumbilical,
    MinimalR3,
    MinimalS3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureName {
    Clifford,
    GreatSphere,
    Catenoid,
    Helicoid,
    MercatorSphere,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Hypersurface dimension.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Surface file of a minimal surface in S³ (minimal-s3 only).
    #[arg(long, conflicts_with = "fixture")]
    pub input: Option<PathBuf>,
    /// Analytic base surface; defaults to mercator-sphere, catenoid and clifford for the three kinds.
    #[arg(long, value_enum)]
    pub fixture: Option<FixtureName>,
    /// Radius of the base sphere (mercator-sphere) or of the ambient S³ (clifford).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Tilt of the generator against the sphere normal (biumbilical only).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Parameter domain `u0,u1,v0,v1`.
    #[arg(long)]
    pub domain: Option<String>,
    /// Nodes per side of the extracted envelope chart.
    #[arg(long, default_value_t = 101)]
    pub chart_nodes: usize,
    /// Generator coordinates are sampled in [−w_range, w_range].
    #[arg(long, default_value_t = 0.5)]
    pub w_range: f64,
    /// Tolerance of the minimality check on the base surface.
    #[arg(long, default_value_t = 1e-3)]
    pub mean_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Spectrum CSV: u, v, w_norm, kappa_1..kappa_n, type_number, classification.
    #[arg(long)]
    pub report: PathBuf,
    /// Verification report (JSON and CSV).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    /// Surface or hypersurface file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_projection, default_value = "stereographic")]
    pub projection: Projection,
    /// Generator coordinate of the hypersurface slice (every w component).
    #[arg(long, default_value_t = 0.0)]
    pub w: f64,
}

fn parse_projection(s: &str) -> Result<Projection, String> {
    Projection::parse(s).ok_or_else(|| format!("unknown projection '{s}' (stereographic, stereographic-north, drop-coordinate)"))
}

fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("{what}: '{t}' is not a number"))))
        .collect()
}

/// `u_min,u_max,nu,v_min,v_max,nv` or `lo,hi,n`.
pub fn parse_grid(s: &str) -> Result<Grid2D, CliError> {
    let x = numbers(s, "grid")?;
    let count = |c: f64| -> Result<usize, CliError> {
        if c.fract() == 0.0 && c >= 0.0 {
            Ok(c as usize)
        } else {
            Err(CliError::Config(format!("grid: node count {c} is not a whole number")))
        }
    };
    let g = match x.as_slice() {
        [lo, hi, n] => Grid2D::square(*lo, *hi, count(*n)?),
        [u0, u1, nu, v0, v1, nv] => Grid2D::new(*u0, *u1, count(*nu)?, *v0, *v1, count(*nv)?),
        _ => return Err(CliError::Config(format!("grid: expected 3 or 6 comma-separated values, got {}", x.len()))),
    };
    g.map_err(|e| CliError::Config(format!("grid: {e}")))
}

/// `u0,u1,v0,v1` with u0 < u1 and v0 < v1.
pub fn parse_domain(s: &str) -> Result<[f64; 4], CliError> {
    match numbers(s, "domain")?.as_slice() {
        &[u0, u1, v0, v1] if u0 < u1 && v0 < v1 => Ok([u0, u1, v0, v1]),
        _ => Err(CliError::Config(format!("domain: expected u0,u1,v0,v1 with u0 < u1 and v0 < v1, got '{s}'"))),
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

fn input_file(p: &Path) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!("input file {} does not exist", p.display())))
    }
}

fn output_file(p: &Path) -> Result<(), CliError> {
    if p.is_dir() {
        return Err(CliError::Config(format!("output {} is a directory", p.display())));
    }
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => Err(CliError::Config(format!("output directory {} does not exist", d.display()))),
        _ => Ok(()),
    }
}

fn frame_spec(s: &str) -> Result<(), CliError> {
    if s == "identity" {
        Ok(())
    } else {
        input_file(Path::new(s))
    }
}

impl RunConfig {
    /// Checks tolerances and paths before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        if let Some(g) = t.gate {
            // a zero gate is admitted as a deliberate failure
            if !(g >= 0.0 && g.is_finite()) {
                return Err(CliError::Config(format!("gate must be nonnegative and finite, got {g}")));
            }
        }
        positive("spectral-tol", t.spectral_tol)?;
        positive("drift-limit", t.drift_limit)?;
        match &self.command {
            Command::SolveSinhPoisson(a) => {
                positive("tol", a.tol)?;
                if a.max_iters == 0 {
                    return Err(CliError::Config("max-iters must be at least 1".into()));
                }
                if !a.guess.is_finite() {
                    return Err(CliError::Config("guess must be finite".into()));
                }
                if let Some(g) = &a.grid {
                    parse_grid(g)?;
                }
                if !is_boundary_preset(&a.boundary) {
                    input_file(Path::new(&a.boundary))?;
                } else if a.grid.is_none() {
                    return Err(CliError::Config(format!("boundary preset '{}' needs --grid", a.boundary)));
                }
                output_file(&a.out)?;
                a.history.iter().chain(&a.report).try_for_each(|p| output_file(p))?;
            }
            Command::Reconstruct(a) => {
                input_file(&a.nu)?;
                frame_spec(&a.frame0)?;
                if !matches!(a.at.as_str(), "center" | "origin") {
                    parse_node(&a.at)?;
                }
                output_file(&a.out)?;
                a.report.iter().chain(&a.obj).try_for_each(|p| output_file(p))?;
            }
            Command::VerifySurface(a) => {
                input_file(&a.input)?;
                positive("principal-tol", a.principal_tol)?;
                if let Some(d) = a.perturb_normal {
                    positive("perturb-normal", d)?;
                }
                a.report.iter().try_for_each(|p| output_file(p))?;
            }
            Command::AssociatedFamily(a) => {
                input_file(&a.nu)?;
                frame_spec(&a.frame0)?;
                if a.angles == 0 {
                    return Err(CliError::Config("angles must be at least 1".into()));
                }
                if let Some(r) = a.radius {
                    positive("radius", r)?;
                }
                if a.out.is_file() {
                    return Err(CliError::Config(format!("output {} is a file", a.out.display())));
                }
                output_file(&a.out)?;
            }
            Command::BuildHypersurface(a) => {
                if a.n < 3 {
                    return Err(CliError::Config(format!("n must be at least 3, got {}", a.n)));
                }
                if let Some(p) = &a.input {
                    input_file(p)?;
                    if a.kind != Kind::MinimalS3 {
                        return Err(CliError::Config("--input is only accepted for minimal-s3".into()));
                    }
                }
                if let Some(r) = a.radius {
                    positive("radius", r)?;
                }
                if !a.alpha.is_finite() {
                    return Err(CliError::Config("alpha must be finite".into()));
                }
                if let Some(d) = &a.domain {
                    parse_domain(d)?;
                }
                if a.chart_nodes < 5 {
                    return Err(CliError::Config("chart-nodes must be at least 5".into()));
                }
                positive("w-range", a.w_range)?;
                positive("mean-tol", a.mean_tol)?;
                output_file(&a.out)?;
                a.report.iter().try_for_each(|p| output_file(p))?;
            }
            Command::Classify(a) => {
                input_file(&a.input)?;
                if a.samples == 0 {
                    return Err(CliError::Config("samples must be at least 1".into()));
                }
                output_file(&a.report)?;
                a.summary.iter().try_for_each(|p| output_file(p))?;
            }
            Command::Export(a) => {
                input_file(&a.input)?;
                if !a.w.is_finite() {
                    return Err(CliError::Config("w must be finite".into()));
                }
                output_file(&a.out)?;
            }
        }
        Ok(())
    }
}

pub fn is_boundary_preset(s: &str) -> bool {
    matches!(s, "zero" | "bump" | "plane-wave") || s.starts_with("const:")
}

/// `i,j` node indices.
pub fn parse_node(s: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [i, j] => match (i.parse(), j.parse()) {
            (Ok(i), Ok(j)) => Ok((i, j)),
            _ => Err(CliError::Config(format!("node '{s}' is not a pair of indices"))),
        },
        _ => Err(CliError::Config(format!("node '{s}' is not of the form i,j"))),
    }
}
