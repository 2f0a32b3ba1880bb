//! Associated families: ν_t(u, v) = ν(cos t·u − sin t·v, sin t·u + cos t·v)
//! solves the same equation, and the surfaces M_t reconstructed from ν_t are
//! mutually isometric.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{reconstruct_surface, Mat4, ReconstructOptions};
use crate::grid::{Grid2D, ScalarField};
use crate::interp::BicubicSpline;
use crate::sinh_poisson::{residual, NormalCurvatureField};
use crate::surface::{invariants, InvariantOptions, SurfaceInvariants, SurfaceS3};

/// Isometry comparisons skip this many nodes next to a member's boundary,
/// where one-sided stencils of the member and of the base differ.
pub const ISOMETRY_MARGIN: usize = 3;

fn rotate(t: f64, u: f64, v: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    (c * u - s * v, s * u + c * v)
}

/// Node spacing and half-width (in nodes) of the square inscribed in the
/// disc of `radius` about the parameter origin, aligned with the grid of `nu`.
fn inscribed(g: &Grid2D, radius: f64) -> Result<(usize, f64)> {
    let h = g.hu();
    if (g.hv() - h).abs() > 1e-12 * h {
        return Err(Error::InvalidParameter("associated families need equal spacing in u and v".into()));
    }
    let slack = 1e-9 * h;
    if !(radius > 0.0) || g.u_min() > -radius + slack || g.u_max() < radius - slack || g.v_min() > -radius + slack || g.v_max() < radius - slack {
        return Err(Error::Domain {
            i: 0,
            j: 0,
            reason: format!("disc of radius {radius} about the origin is not inside the grid"),
        });
    }
    let m = (radius / (std::f64::consts::SQRT_2 * h) + 1e-9).floor() as usize;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("disc of radius {radius} holds fewer than 5x5 nodes")));
    }
    Ok((m, h))
}

/// Largest disc about the origin inside the grid.
pub fn max_disc_radius(g: &Grid2D) -> f64 {
    (-g.u_min()).min(g.u_max()).min(-g.v_min()).min(g.v_max())
}

/// ν_t on the square grid inscribed in the disc, by bicubic interpolation of ln ν.
pub fn rotate_solution(nu: &NormalCurvatureField, t: f64, disc_radius: f64) -> Result<NormalCurvatureField> {
    let g = *nu.grid();
    let (m, h) = inscribed(&g, disc_radius)?;
    let half = m as f64 * h;
    let member = Grid2D::new(-half, half, 2 * m + 1, -half, half, 2 * m + 1)?;
    let spline = BicubicSpline::from_scalar(&nu.log());
    let mut f = Vec::with_capacity(member.len());
    for k in 0..member.len() {
        let (i, j) = member.node(k);
        let (u, v) = member.coords(i, j);
        let (a, b) = rotate(t, u, v);
        f.push(spline.eval_scalar(a, b)?);
    }
    NormalCurvatureField::from_log(&ScalarField::new(member, f)?)
}

/// One surface of the family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub t: f64,
    pub nu_t: NormalCurvatureField,
    pub surface: SurfaceS3,
    pub invariants: SurfaceInvariants,
    /// Max |residual(ν_t)| over interior nodes.
    pub residual: f64,
}

fn origin_node(g: &Grid2D) -> (usize, usize) {
    let near = |lo: f64, h: f64, n: usize| (((-lo) / h).round().max(0.0) as usize).min(n - 1);
    (near(g.u_min(), g.hu(), g.nu()), near(g.v_min(), g.hv(), g.nv()))
}

impl FamilyMember {
    /// Reconstructs the surface of `nu_t` with `frame0` at the node nearest the parameter origin.
    pub fn reconstruct(t: f64, nu_t: NormalCurvatureField, frame0: &Mat4, opts: &ReconstructOptions) -> Result<Self> {
        let g = *nu_t.grid();
        let rec = reconstruct_surface(&nu_t, frame0, Some(origin_node(&g)), opts)?;
        let inv = invariants(&rec.surface, &InvariantOptions::default())?.oriented();
        Ok(FamilyMember {
            t,
            residual: residual(&nu_t)?.max_abs(),
            nu_t,
            surface: rec.surface,
            invariants: inv,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        self.surface.grid()
    }
}

/// Family members in the order of the requested angles, plus the angles whose
/// member failed a gate (with the reason).
#[derive(Debug, Clone)]
pub struct Family {
    pub base: FamilyMember,
    pub members: Vec<FamilyMember>,
    pub failures: Vec<(f64, String)>,
}

/// Base surface on the full grid and one member per angle on the inscribed
/// square of `disc_radius` (the largest disc in the grid when `None`).
pub fn build_family(nu: &NormalCurvatureField, ts: &[f64], frame0: &Mat4, disc_radius: Option<f64>, opts: &ReconstructOptions) -> Result<Family> {
    let radius = disc_radius.unwrap_or_else(|| max_disc_radius(nu.grid()));
    inscribed(nu.grid(), radius)?;
    let base = FamilyMember::reconstruct(0.0, nu.clone(), frame0, opts)?;
    let outcomes: Vec<(f64, Result<FamilyMember>)> = ts
        .par_iter()
        .map(|&t| (t, rotate_solution(nu, t, radius).and_then(|nt| FamilyMember::reconstruct(t, nt, frame0, opts))))
        .collect();
    let mut members = Vec::new();
    let mut failures = Vec::new();
    for (t, r) in outcomes {
        match r {
            Ok(m) => members.push(m),
            Err(e) => failures.push((t, e.to_string())),
        }
    }
    Ok(Family { base, members, failures })
}

/// Isometry measurements of a member against the base at rotated arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub t: f64,
    /// max |E_t(u, v) − E(R_t(u, v))|.
    pub e_deviation: f64,
    /// max |G_t(u, v) − G(R_t(u, v))|.
    pub g_deviation: f64,
    /// max(|F_t|, |F∘R_t|).
    pub f_max: f64,
    /// max(|E_t − 1/ν_t|, |G_t − 1/ν_t|).
    pub canonical_deviation: f64,
    /// max |K_t(u, v) − K(R_t(u, v))| with K = 1 + ν₁ν₂.
    pub curvature_deviation: f64,
    pub gate: f64,
    pub pass: bool,
}

impl IsometryReport {
    pub fn csv_header() -> &'static str {
        "t,e_deviation,g_deviation,f_max,canonical_deviation,curvature_deviation,gate,pass"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.t, self.e_deviation, self.g_deviation, self.f_max, self.canonical_deviation, self.curvature_deviation, self.gate, self.pass
        )
    }
}

/// Compares `other` with `base` on nodes at least [`ISOMETRY_MARGIN`] steps
/// inside the member grid; the gate is 20 h² of the member grid.
pub fn verify_isometry(base: &FamilyMember, other: &FamilyMember) -> Result<IsometryReport> {
    let bf = &base.invariants.forms;
    let spline = |f: &ScalarField| BicubicSpline::from_scalar(f);
    let (se, sf, sg) = (spline(&bf.e_first), spline(&bf.f_first), spline(&bf.g_first));
    let sk = spline(&base.invariants.gauss_curvature);
    let g = *other.grid();
    let of = &other.invariants.forms;
    let mut r = IsometryReport {
        t: other.t,
        e_deviation: 0.0,
        g_deviation: 0.0,
        f_max: 0.0,
        canonical_deviation: 0.0,
        curvature_deviation: 0.0,
        gate: 20.0 * g.h_max() * g.h_max(),
        pass: false,
    };
    let m = ISOMETRY_MARGIN;
    for j in m..g.nv().saturating_sub(m) {
        for i in m..g.nu().saturating_sub(m) {
            let (u, v) = g.coords(i, j);
            let (a, b) = rotate(other.t - base.t, u, v);
            let et = of.e_first.at(i, j);
            let gt = of.g_first.at(i, j);
            r.e_deviation = r.e_deviation.max((et - se.eval_scalar(a, b)?).abs());
            r.g_deviation = r.g_deviation.max((gt - sg.eval_scalar(a, b)?).abs());
            r.f_max = r.f_max.max(of.f_first.at(i, j).abs()).max(sf.eval_scalar(a, b)?.abs());
            let inv_nu = 1.0 / other.nu_t.field().at(i, j);
            r.canonical_deviation = r.canonical_deviation.max((et - inv_nu).abs()).max((gt - inv_nu).abs());
            let k = other.invariants.gauss_curvature.at(i, j);
            r.curvature_deviation = r.curvature_deviation.max((k - sk.eval_scalar(a, b)?).abs());
        }
    }
    r.pass = r.e_deviation < r.gate && r.g_deviation < r.gate && r.f_max < r.gate && r.canonical_deviation < r.gate;
    Ok(r)
}
