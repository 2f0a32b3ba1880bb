//! Geometry of discrete surfaces in S³: fundamental forms, the invariants
//! ν₁, ν₂, γ₁, γ₂, Codazzi and Gauss residuals, and reparameterization by
//! canonical principal parameters.

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    integrate_along_u, integrate_along_v, partial_u, partial_uu, partial_uv, partial_v, partial_vv, same_grid, Grid2D, MaskedField, ScalarField, VectorField,
};
use crate::interp::BicubicSpline;

/// Surface l(u, v) in the unit 3-sphere, with an optional unit normal N tangent to S³.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceS3 {
    l: VectorField,
    n: Option<VectorField>,
}

impl SurfaceS3 {
    /// Validates |l| = 1 to 1e-8 and, when given, |N| = 1 and N ⟂ l to 1e-6, and
    /// N ⟂ l_u, l_v to 1e-6 at interior nodes.
    pub fn new(l: VectorField, n: Option<VectorField>) -> Result<Self> {
        if l.dim() != 4 {
            return Err(Error::Dimension(format!("surface in S^3 needs 4 components, got {}", l.dim())));
        }
        let g = *l.grid();
        for (k, x) in l.nodes().enumerate() {
            let r = norm(x);
            if (r - 1.0).abs() > 1e-8 {
                let (i, j) = g.node(k);
                return Err(Error::Domain {
                    i,
                    j,
                    reason: format!("|l| = {r} is not 1"),
                });
            }
        }
        if let Some(nf) = &n {
            same_grid(&g, nf.grid())?;
            if nf.dim() != 4 {
                return Err(Error::Dimension("normal field needs 4 components".into()));
            }
            let (lu, lv) = (l.partial_u()?, l.partial_v()?);
            for k in 0..g.len() {
                let x = nf.at_index(k);
                let (i, j) = g.node(k);
                let mut err = (norm(x) - 1.0).abs().max(dot(x, l.at_index(k)).abs());
                // one-sided boundary stencils carry O(h²) normal components
                if g.is_interior(i, j) {
                    err = err
                        .max(dot(x, lu.at_index(k)).abs() / norm(lu.at_index(k)))
                        .max(dot(x, lv.at_index(k)).abs() / norm(lv.at_index(k)));
                }
                if err > 1e-6 {
                    return Err(Error::Domain {
                        i,
                        j,
                        reason: format!("supplied normal is not a unit normal in S^3 (defect {err:e})"),
                    });
                }
            }
        }
        Ok(SurfaceS3 { l, n })
    }

    /// Sample an analytic chart; the result is renormalized onto S³.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> [f64; 4]) -> Result<Self> {
        let l = VectorField::from_fn(grid, 4, |u, v| {
            let x = f(u, v);
            let r = (x.iter().map(|c| c * c).sum::<f64>()).sqrt();
            x.iter().map(|c| c / r).collect()
        })?;
        Self::new(l, None)
    }

    pub fn grid(&self) -> &Grid2D {
        self.l.grid()
    }

    pub fn l(&self) -> &VectorField {
        &self.l
    }

    pub fn normal(&self) -> Option<&VectorField> {
        self.n.as_ref()
    }

    /// Apply a 4×4 matrix (typically a rotation) to l and N.
    pub fn transformed(&self, m: &Matrix4<f64>) -> Result<Self> {
        let apply = |f: &VectorField| {
            let nodes: Vec<Vec<f64>> = f.nodes().map(|x| (m * Vector4::from_column_slice(x)).iter().copied().collect()).collect();
            VectorField::from_nodes(*f.grid(), 4, &nodes)
        };
        let n = match &self.n {
            Some(n) => Some(apply(n)?),
            None => None,
        };
        Self::new(apply(&self.l)?, n)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Unit normal in S³ with det[l_u, l_v, N, l] > 0.
pub fn normal_from_tangents(lu: &[f64], lv: &[f64], l: &[f64]) -> Option<[f64; 4]> {
    // cofactors c_i of the last row of [lu; lv; l; x] give det[lu, lv, l, c] = |c|^2
    let rows = [lu, lv, l];
    let mut c = [0.0; 4];
    for (i, ci) in c.iter_mut().enumerate() {
        let cols: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let m = Matrix3::from_fn(|r, q| rows[r][cols[q]]);
        let sign = if (i + 3) % 2 == 0 { 1.0 } else { -1.0 };
        *ci = sign * m.determinant();
    }
    let r = norm(&c);
    if !(r > 1e-10 * norm(lu) * norm(lv)) {
        return None;
    }
    // det[lu, lv, N, l] = -det[lu, lv, l, N]
    Some([-c[0] / r, -c[1] / r, -c[2] / r, -c[3] / r])
}

/// First and second fundamental form coefficients, with the normal used.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForms {
    pub e_first: ScalarField,
    pub f_first: ScalarField,
    pub g_first: ScalarField,
    pub e: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
    pub normal: VectorField,
}

impl FundamentalForms {
    pub fn grid(&self) -> &Grid2D {
        self.e_first.grid()
    }
}

/// E = l_u·l_u, F = l_u·l_v, G = l_v·l_v; e = l_uu·N, f = l_uv·N, g = l_vv·N.
/// N is the supplied normal, or else the right-handed completion of (l_u, l_v, l).
pub fn fundamental_forms(s: &SurfaceS3) -> Result<FundamentalForms> {
    let l = &s.l;
    let g = *l.grid();
    let n = match &s.n {
        Some(n) => n.clone(),
        None => {
            let (lu, lv) = (l.partial_u()?, l.partial_v()?);
            let mut nodes = Vec::with_capacity(g.len());
            for k in 0..g.len() {
                let Some(nk) = normal_from_tangents(lu.at_index(k), lv.at_index(k), l.at_index(k)) else {
                    let (i, j) = g.node(k);
                    return Err(Error::Regularity(format!("l_u and l_v are dependent at node ({i}, {j})")));
                };
                nodes.push(nk.to_vec());
            }
            VectorField::from_nodes(g, 4, &nodes)?
        }
    };
    fundamental_forms_with_normal(s, &n)
}

/// Same as [`fundamental_forms`] with an arbitrary normal field (no validation).
pub fn fundamental_forms_with_normal(s: &SurfaceS3, n: &VectorField) -> Result<FundamentalForms> {
    let l = &s.l;
    same_grid(l.grid(), n.grid())?;
    let (lu, lv) = (l.partial_u()?, l.partial_v()?);
    let (luu, luv, lvv) = (l.partial_uu()?, l.partial_uv()?, l.partial_vv()?);
    let w = lu
        .dot(&lu)?
        .values()
        .iter()
        .zip(lv.dot(&lv)?.values())
        .zip(lu.dot(&lv)?.values())
        .position(|((e, g), f)| !(e * g - f * f > 0.0));
    if let Some(k) = w {
        let (i, j) = l.grid().node(k);
        return Err(Error::Regularity(format!("degenerate first fundamental form at node ({i}, {j})")));
    }
    Ok(FundamentalForms {
        e_first: lu.dot(&lu)?,
        f_first: lu.dot(&lv)?,
        g_first: lv.dot(&lv)?,
        e: luu.dot(n)?,
        f: luv.dot(n)?,
        g: lvv.dot(n)?,
        normal: n.clone(),
    })
}

/// Measured invariants together with the forms they come from.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceInvariants {
    pub forms: FundamentalForms,
    pub nu1: ScalarField,
    pub nu2: ScalarField,
    pub gamma1: ScalarField,
    pub gamma2: ScalarField,
    /// (ν₁ + ν₂)/2.
    pub mean_curvature: ScalarField,
    /// 1 + ν₁ν₂.
    pub gauss_curvature: ScalarField,
    /// Intrinsic curvature from the first fundamental form (Brioschi formula).
    pub intrinsic_curvature: ScalarField,
    /// max(|F|/√(EG), |f|/√(|eg| + ε)) over interior nodes.
    pub principal_defect: f64,
    /// True when N was negated by [`SurfaceInvariants::oriented`].
    pub flipped: bool,
}

impl SurfaceInvariants {
    pub fn grid(&self) -> &Grid2D {
        self.nu1.grid()
    }

    /// Orient N so that ν₁ − ν₂ > 0 (at the first interior node); negates
    /// e, f, g, ν₁, ν₂ and the mean curvature. γ₁, γ₂ and K are unchanged.
    pub fn oriented(mut self) -> Self {
        let g = *self.grid();
        let (i, j) = (1.min(g.nu() - 1), 1.min(g.nv() - 1));
        if self.nu1.at(i, j) - self.nu2.at(i, j) >= 0.0 {
            return self;
        }
        let neg = |f: &ScalarField| f.map(|x| -x).expect("negation keeps fields finite");
        self.forms.e = neg(&self.forms.e);
        self.forms.f = neg(&self.forms.f);
        self.forms.g = neg(&self.forms.g);
        let nn: Vec<f64> = self.forms.normal.data().iter().map(|x| -x).collect();
        self.forms.normal = VectorField::new(g, 4, nn).expect("negation keeps fields finite");
        self.nu1 = neg(&self.nu1);
        self.nu2 = neg(&self.nu2);
        self.mean_curvature = neg(&self.mean_curvature);
        self.flipped = !self.flipped;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantOptions {
    pub principal_tol: f64,
    pub epsilon: f64,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            principal_tol: 1e-4,
            epsilon: 1e-12,
        }
    }
}

fn principal_defect(forms: &FundamentalForms, eps: f64) -> f64 {
    let g = *forms.grid();
    let mut d: f64 = 0.0;
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        if !g.is_interior(i, j) {
            continue;
        }
        let (e1, f1, g1) = (forms.e_first.values()[k], forms.f_first.values()[k], forms.g_first.values()[k]);
        let (e2, f2, g2) = (forms.e.values()[k], forms.f.values()[k], forms.g.values()[k]);
        d = d.max(f1.abs() / (e1 * g1).sqrt()).max(f2.abs() / ((e2 * g2).abs() + eps).sqrt());
    }
    d
}

/// Gauss curvature of the metric E du² + 2F du dv + G dv².
pub fn brioschi_curvature(forms: &FundamentalForms) -> Result<ScalarField> {
    let (e, f, g) = (&forms.e_first, &forms.f_first, &forms.g_first);
    let (eu, ev, evv) = (partial_u(e)?, partial_v(e)?, partial_vv(e)?);
    let (fu, fv, fuv) = (partial_u(f)?, partial_v(f)?, partial_uv(f)?);
    let (gu, gv, guu) = (partial_u(g)?, partial_v(g)?, partial_uu(g)?);
    let grid = *e.grid();
    let values = (0..grid.len())
        .map(|k| {
            let (e, f, g) = (e.values()[k], f.values()[k], g.values()[k]);
            let (eu, ev, evv) = (eu.values()[k], ev.values()[k], evv.values()[k]);
            let (fu, fv, fuv) = (fu.values()[k], fv.values()[k], fuv.values()[k]);
            let (gu, gv, guu) = (gu.values()[k], gv.values()[k], guu.values()[k]);
            #[rustfmt::skip]
            let m1 = Matrix3::new(
                -0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev,
                fv - 0.5 * gu,                e,        f,
                0.5 * gv,                     f,        g,
            );
            #[rustfmt::skip]
            let m2 = Matrix3::new(
                0.0,      0.5 * ev, 0.5 * gu,
                0.5 * ev, e,        f,
                0.5 * gu, f,        g,
            );
            let w = e * g - f * f;
            (m1.determinant() - m2.determinant()) / (w * w)
        })
        .collect();
    ScalarField::new(grid, values)
}

/// Invariants from fundamental forms; requires a principal parameter net.
pub fn invariants_from_forms(forms: FundamentalForms, opts: &InvariantOptions) -> Result<SurfaceInvariants> {
    let defect = principal_defect(&forms, opts.epsilon);
    if !(defect < opts.principal_tol) {
        return Err(Error::PrincipalNet {
            defect,
            tol: opts.principal_tol,
        });
    }
    let (e1, g1) = (&forms.e_first, &forms.g_first);
    let nu1 = forms.e.zip_map(e1, |e, ee| e / ee)?;
    let nu2 = forms.g.zip_map(g1, |g, gg| g / gg)?;
    let (ev, gu) = (partial_v(e1)?, partial_u(g1)?);
    let grid = *e1.grid();
    let mut gamma1 = vec![0.0; grid.len()];
    let mut gamma2 = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let (e, g) = (e1.values()[k], g1.values()[k]);
        gamma1[k] = -ev.values()[k] / (2.0 * e * g.sqrt());
        gamma2[k] = gu.values()[k] / (2.0 * g * e.sqrt());
    }
    let mean_curvature = nu1.zip_map(&nu2, |a, b| 0.5 * (a + b))?;
    let gauss_curvature = nu1.zip_map(&nu2, |a, b| 1.0 + a * b)?;
    let intrinsic_curvature = brioschi_curvature(&forms)?;
    Ok(SurfaceInvariants {
        forms,
        nu1,
        nu2,
        gamma1: ScalarField::new(grid, gamma1)?,
        gamma2: ScalarField::new(grid, gamma2)?,
        mean_curvature,
        gauss_curvature,
        intrinsic_curvature,
        principal_defect: defect,
        flipped: false,
    })
}

/// ν₁ = e/E, ν₂ = g/G, γ₁ = −E_v/(2E√G), γ₂ = G_u/(2G√E), mean and Gauss curvature.
pub fn invariants(s: &SurfaceS3, opts: &InvariantOptions) -> Result<SurfaceInvariants> {
    invariants_from_forms(fundamental_forms(s)?, opts)
}

fn check_umbilic(inv: &SurfaceInvariants) -> Result<()> {
    let g = *inv.grid();
    for k in 0..g.len() {
        let gap = (inv.nu1.values()[k] - inv.nu2.values()[k]).abs();
        let scale = inv.nu1.values()[k].abs() + inv.nu2.values()[k].abs();
        if !(gap > 1e-8 * (1.0 + scale)) {
            let (i, j) = g.node(k);
            return Err(Error::Umbilic { i, j, gap });
        }
    }
    Ok(())
}

/// γ₁ − (ν₁)_v / (√G(ν₁−ν₂)) and γ₂ − (ν₂)_u / (√E(ν₁−ν₂)); nodes two or
/// more steps inside, since nested differences are first order at the boundary.
pub fn codazzi_residual(inv: &SurfaceInvariants) -> Result<(MaskedField, MaskedField)> {
    check_umbilic(inv)?;
    let g = *inv.grid();
    let (n1v, n2u) = (partial_v(&inv.nu1)?, partial_u(&inv.nu2)?);
    let mut r1 = vec![0.0; g.len()];
    let mut r2 = vec![0.0; g.len()];
    for k in 0..g.len() {
        let d = inv.nu1.values()[k] - inv.nu2.values()[k];
        let (se, sg) = (inv.forms.e_first.values()[k].sqrt(), inv.forms.g_first.values()[k].sqrt());
        r1[k] = inv.gamma1.values()[k] - n1v.values()[k] / (sg * d);
        r2[k] = inv.gamma2.values()[k] - n2u.values()[k] / (se * d);
    }
    Ok((
        MaskedField::with_margin(ScalarField::new(g, r1)?, 2),
        MaskedField::with_margin(ScalarField::new(g, r2)?, 2),
    ))
}

/// (γ₁)_v/√G − (γ₂)_u/√E − (γ₁² + γ₂²) − (1 + ν₁ν₂); nodes two or more steps inside.
pub fn gauss_residual(inv: &SurfaceInvariants) -> Result<MaskedField> {
    let g = *inv.grid();
    let (g1v, g2u) = (partial_v(&inv.gamma1)?, partial_u(&inv.gamma2)?);
    let values = (0..g.len())
        .map(|k| {
            let (se, sg) = (inv.forms.e_first.values()[k].sqrt(), inv.forms.g_first.values()[k].sqrt());
            let (a, b) = (inv.gamma1.values()[k], inv.gamma2.values()[k]);
            g1v.values()[k] / sg - g2u.values()[k] / se - (a * a + b * b) - (1.0 + inv.nu1.values()[k] * inv.nu2.values()[k])
        })
        .collect();
    Ok(MaskedField::with_margin(ScalarField::new(g, values)?, 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReparamOptions {
    /// Bound on |ν₁ + ν₂| (minimality).
    pub minimal_tol: f64,
    /// Bound on the relative variation of √(νE) in v and of √(νG) in u.
    pub separability_tol: f64,
}

impl Default for ReparamOptions {
    fn default() -> Self {
        ReparamOptions {
            minimal_tol: 1e-3,
            separability_tol: 1e-3,
        }
    }
}

/// Inverse of a monotone cubic Hermite interpolant through (x_k, y_k) with slopes s_k.
fn invert_monotone(x: &[f64], y: &[f64], s: &[f64], target: f64) -> f64 {
    let n = x.len();
    let k = match y.partition_point(|&yk| yk <= target) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let h = x[k + 1] - x[k];
    let eval = |t: f64| {
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y[k] + (t3 - 2.0 * t2 + t) * h * s[k] + (-2.0 * t3 + 3.0 * t2) * y[k + 1] + (t3 - t2) * h * s[k + 1];
        let d =
            ((6.0 * t2 - 6.0 * t) * y[k] + (3.0 * t2 - 4.0 * t + 1.0) * h * s[k] + (-6.0 * t2 + 6.0 * t) * y[k + 1] + (3.0 * t2 - 2.0 * t) * h * s[k + 1]) / h;
        (v, d)
    };
    let mut t = ((target - y[k]) / (y[k + 1] - y[k])).clamp(0.0, 1.0);
    for _ in 0..30 {
        let (v, d) = eval(t);
        let dt = (v - target) / (d * h);
        t = (t - dt).clamp(-0.5, 1.5);
        if dt.abs() < 1e-15 {
            break;
        }
    }
    x[k] + t * h
}

/// Resample onto canonical parameters ū = ∫√(νE) du, v̄ = ∫√(νG) dv measured
/// from node `origin`, where ν = |ν₁ − ν₂|/2. The new grid has the same node
/// counts and spans the image of the old one; ū = v̄ = 0 at the origin.
pub fn canonical_reparameterize(s: &SurfaceS3, inv: &SurfaceInvariants, origin: (usize, usize), opts: &ReparamOptions) -> Result<SurfaceS3> {
    let g = *s.grid();
    same_grid(&g, inv.grid())?;
    let (i0, j0) = origin;
    if i0 >= g.nu() || j0 >= g.nv() {
        return Err(Error::InvalidParameter(format!("origin ({i0}, {j0}) outside the grid")));
    }
    let mean = MaskedField::interior(inv.mean_curvature.clone()).max_abs();
    if !(mean < opts.minimal_tol / 2.0) {
        return Err(Error::NonMinimal {
            mean_curvature: mean,
            tol: opts.minimal_tol / 2.0,
        });
    }
    let nu = inv.nu1.zip_map(&inv.nu2, |a, b| 0.5 * (a - b).abs())?;
    let a = nu.zip_map(&inv.forms.e_first, |n, e| (n * e).sqrt())?;
    let b = nu.zip_map(&inv.forms.g_first, |n, gg| (n * gg).sqrt())?;
    let mut variation: f64 = 0.0;
    for i in 0..g.nu() {
        let col: Vec<f64> = (0..g.nv()).map(|j| a.at(i, j)).collect();
        variation = variation.max(rel_spread(&col));
    }
    for j in 0..g.nv() {
        let row: Vec<f64> = (0..g.nu()).map(|i| b.at(i, j)).collect();
        variation = variation.max(rel_spread(&row));
    }
    if !(variation < opts.separability_tol) {
        return Err(Error::Separability {
            variation,
            tol: opts.separability_tol,
        });
    }
    let ubar = integrate_along_u(&a, j0, i0)?;
    let vbar = integrate_along_v(&b, i0, j0)?;
    let us: Vec<f64> = (0..g.nu()).map(|i| g.u(i)).collect();
    let vs: Vec<f64> = (0..g.nv()).map(|j| g.v(j)).collect();
    let sa: Vec<f64> = (0..g.nu()).map(|i| a.at(i, j0)).collect();
    let sb: Vec<f64> = (0..g.nv()).map(|j| b.at(i0, j)).collect();
    let out = Grid2D::new(ubar[0], ubar[g.nu() - 1], g.nu(), vbar[0], vbar[g.nv() - 1], g.nv())?;
    let spline = BicubicSpline::from_vector(s.l());
    let mut nodes = Vec::with_capacity(out.len());
    let u_of: Vec<f64> = (0..out.nu()).map(|i| invert_monotone(&us, &ubar, &sa, out.u(i))).collect();
    let v_of: Vec<f64> = (0..out.nv()).map(|j| invert_monotone(&vs, &vbar, &sb, out.v(j))).collect();
    for &v in &v_of {
        for &u in &u_of {
            let x = spline.eval(u.clamp(g.u_min(), g.u_max()), v.clamp(g.v_min(), g.v_max()))?;
            let r = norm(&x);
            nodes.push(x.iter().map(|c| c / r).collect::<Vec<_>>());
        }
    }
    SurfaceS3::new(VectorField::from_nodes(out, 4, &nodes)?, None)
}

fn rel_spread(x: &[f64]) -> f64 {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (hi - lo) / m.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn clifford(n: usize) -> SurfaceS3 {
        let g = Grid2D::square(0.0, 2.0 * PI, n).unwrap();
        SurfaceS3::from_fn(g, |u, v| [u.cos(), u.sin(), v.cos(), v.sin()].map(|x| x * FRAC_1_SQRT_2)).unwrap()
    }

    #[test]
    fn clifford_forms_with_supplied_normal() {
        let s = clifford(201);
        let g = *s.grid();
        let n = VectorField::from_fn(g, 4, |u, v| [u.cos(), u.sin(), -v.cos(), -v.sin()].iter().map(|x| x * FRAC_1_SQRT_2).collect()).unwrap();
        let s = SurfaceS3::new(s.l().clone(), Some(n)).unwrap();
        let ff = fundamental_forms(&s).unwrap();
        let h2 = g.hu() * g.hu();
        let (i, j) = (50, 120);
        assert!((ff.e_first.at(i, j) - 0.5).abs() < h2);
        assert!((ff.g_first.at(i, j) - 0.5).abs() < h2);
        assert!(ff.f_first.at(i, j).abs() < 1e-12);
        assert!((ff.e.at(i, j) + 0.5).abs() < h2);
        assert!(ff.f.at(i, j).abs() < 1e-12);
        assert!((ff.g.at(i, j) - 0.5).abs() < h2);
    }

    #[test]
    fn recomputed_normal_is_right_handed() {
        let s = clifford(101);
        let ff = fundamental_forms(&s).unwrap();
        let (lu, lv) = (s.l().partial_u().unwrap(), s.l().partial_v().unwrap());
        let k = s.grid().index(30, 70);
        let m = Matrix4::from_rows(&[
            nalgebra::RowVector4::from_row_slice(lu.at_index(k)),
            nalgebra::RowVector4::from_row_slice(lv.at_index(k)),
            nalgebra::RowVector4::from_row_slice(ff.normal.at_index(k)),
            nalgebra::RowVector4::from_row_slice(s.l().at_index(k)),
        ]);
        assert!(m.determinant() > 0.0);
        // the supplied normal of the previous test is the opposite orientation
        let (u, v) = s.grid().coords(30, 70);
        let supplied = [u.cos(), u.sin(), -v.cos(), -v.sin()].map(|x| x * FRAC_1_SQRT_2);
        assert!((dot(ff.normal.at_index(k), &supplied) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn great_sphere_is_totally_geodesic_and_satisfies_gauss() {
        let g = Grid2D::new(-1.0, 1.0, 81, 0.0, 2.0, 81).unwrap();
        let s = SurfaceS3::from_fn(g, |u, v| [u.cos() * v.cos(), u.cos() * v.sin(), u.sin(), 0.0]).unwrap();
        let ff = fundamental_forms(&s).unwrap();
        for f in [&ff.e, &ff.f, &ff.g] {
            assert!(f.max_abs() < 1e-12);
        }
        let inv = invariants_from_forms(ff, &InvariantOptions::default()).unwrap();
        // γ₂ = G_u/(2G√E) = -tan u for E = 1, G = cos²u
        let (i, j) = (20, 40);
        assert!((inv.gamma2.at(i, j) + g.u(i).tan()).abs() < 1e-3);
        assert!(gauss_residual(&inv).unwrap().max_abs() < 20.0 * g.hu() * g.hu());
        // umbilic everywhere
        assert!(matches!(codazzi_residual(&inv), Err(Error::Umbilic { .. })));
    }

    #[test]
    fn clifford_invariants() {
        let s = clifford(101);
        let inv = invariants(&s, &InvariantOptions::default()).unwrap();
        let m = MaskedField::interior;
        // second-order differences of a unit-frequency chart: error about h²/4
        let h2 = s.grid().hu().powi(2);
        assert!(m(inv.nu1.map(|x| x - 1.0).unwrap()).max_abs() < h2);
        assert!(m(inv.nu2.map(|x| x + 1.0).unwrap()).max_abs() < h2);
        assert!(inv.gamma1.max_abs() < 1e-12 && inv.gamma2.max_abs() < 1e-12);
        assert!(m(inv.gauss_curvature.clone()).max_abs() < h2);
        let (c1, c2) = codazzi_residual(&inv).unwrap();
        assert!(c1.max_abs() < 1e-12 && c2.max_abs() < 1e-12);
        assert!(gauss_residual(&inv).unwrap().max_abs() < h2);
        // the ordering pass keeps ν₁ − ν₂ > 0
        let o = inv.clone().oriented();
        assert!(!o.flipped && o.nu1 == inv.nu1);
    }

    #[test]
    fn rigid_rotation_leaves_forms_unchanged() {
        let g = Grid2D::square(0.2, 1.2, 41).unwrap();
        let s = SurfaceS3::from_fn(g, |u, v| [u.cos() * v.cos(), u.sin() * v.cos(), v.sin() * 0.6, v.sin() * 0.8]).unwrap();
        let q = Matrix4::new(0.5, -0.5, 0.5, -0.5, 0.5, 0.5, 0.5, 0.5, -0.5, -0.5, 0.5, 0.5, 0.5, -0.5, -0.5, 0.5);
        assert!((q * q.transpose() - Matrix4::identity()).abs().max() < 1e-15 && q.determinant() > 0.0);
        let r = s.transformed(&q).unwrap();
        let (a, b) = (fundamental_forms(&s).unwrap(), fundamental_forms(&r).unwrap());
        for (x, y) in [
            (&a.e_first, &b.e_first),
            (&a.f_first, &b.f_first),
            (&a.g_first, &b.g_first),
            (&a.e, &b.e),
            (&a.f, &b.f),
            (&a.g, &b.g),
        ] {
            assert!(x.zip_map(y, |p, q| p - q).unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn non_principal_chart_is_refused() {
        let g = Grid2D::square(0.0, 1.0, 31).unwrap();
        // Clifford torus in skewed parameters
        let s = SurfaceS3::from_fn(g, |u, v| [(u + v).cos(), (u + v).sin(), (u - 0.5 * v).cos(), (u - 0.5 * v).sin()]).unwrap();
        assert!(matches!(invariants(&s, &InvariantOptions::default()), Err(Error::PrincipalNet { .. })));
    }

    #[test]
    fn parameter_scaling_keeps_normal_curvatures() {
        let base = |u: f64, v: f64| [u.cos(), u.sin(), v.cos(), v.sin()].map(|x| x * FRAC_1_SQRT_2);
        let g = Grid2D::new(0.0, 1.0, 201, 0.0, 1.0, 101).unwrap();
        let s1 = SurfaceS3::from_fn(g, base).unwrap();
        let s2 = SurfaceS3::from_fn(g, |u, v| base(2.0 * u, v)).unwrap();
        let (a, b) = (
            invariants(&s1, &InvariantOptions::default()).unwrap(),
            invariants(&s2, &InvariantOptions::default()).unwrap(),
        );
        let k = g.index(100, 50);
        assert!((b.forms.e_first.values()[k] / a.forms.e_first.values()[k] - 4.0).abs() < 1e-3);
        assert!((b.nu1.values()[k] - a.nu1.values()[k]).abs() < 1e-3);
    }

    #[test]
    fn identity_reparameterization_of_a_canonical_chart() {
        // radii 1/√2 and rate √2: E = G = 1 and ν = 1
        let r2 = std::f64::consts::SQRT_2;
        let chart = move |u: f64, v: f64| [(r2 * u).cos(), (r2 * u).sin(), (r2 * v).cos(), (r2 * v).sin()].map(|x| x * FRAC_1_SQRT_2);
        let g = Grid2D::square(-0.25, 0.25, 251).unwrap();
        let s = SurfaceS3::from_fn(g, chart).unwrap();
        let inv = invariants(&s, &InvariantOptions::default()).unwrap();
        let c = g.center();
        let out = canonical_reparameterize(&s, &inv, c, &ReparamOptions::default()).unwrap();
        let err = (0..g.len())
            .map(|k| {
                let (p, q) = (s.l().at_index(k), out.l().at_index(k));
                p.iter().zip(q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn stretched_chart_recovers_canonical_parameters() {
        let r2 = std::f64::consts::SQRT_2;
        let chart = move |u: f64, v: f64| [(r2 * u).cos(), (r2 * u).sin(), (r2 * v).cos(), (r2 * v).sin()].map(|x| x * FRAC_1_SQRT_2);
        let g = Grid2D::new(-0.2, 0.2, 161, -0.3, 0.3, 121).unwrap();
        let s = SurfaceS3::from_fn(g, |u, v| chart(2.0 * u, v)).unwrap();
        let inv = invariants(&s, &InvariantOptions::default()).unwrap();
        let out = canonical_reparameterize(&s, &inv, g.center(), &ReparamOptions::default()).unwrap();
        let og = *out.grid();
        assert!((og.u_max() - og.u_min() - 0.8).abs() < 1e-4);
        let mut err: f64 = 0.0;
        for (i, j) in og.full_window().nodes() {
            let (u, v) = og.coords(i, j);
            let x = chart(u, v);
            let y = out.l().at(i, j);
            err = err.max(x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn round_sphere_is_not_minimal() {
        let g = Grid2D::new(-0.5, 0.5, 41, 0.0, 1.0, 41).unwrap();
        // small sphere of geodesic radius π/4 in S³: umbilic, ν₁ = ν₂ = 1
        let c = FRAC_1_SQRT_2;
        let s = SurfaceS3::from_fn(g, |u, v| [c * u.cos() * v.cos(), c * u.cos() * v.sin(), c * u.sin(), c]).unwrap();
        let inv = invariants(&s, &InvariantOptions::default()).unwrap();
        assert!(matches!(
            canonical_reparameterize(&s, &inv, g.center(), &ReparamOptions::default()),
            Err(Error::NonMinimal { .. })
        ));
    }
}
