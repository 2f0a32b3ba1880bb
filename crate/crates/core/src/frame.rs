//! Frame system of a strongly regular surface in S³: coefficient matrices,
//! integrability residual and RK4 transport of the moving frame (X, Y, N, l).
//!
//! A frame is a 4×4 matrix whose rows are X, Y, N, l. The system reads
//! `F_u = A F`, `F_v = B F`, with integrability condition `B_u − A_v = AB − BA`.

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{partial_u, partial_v, same_grid, Grid2D, MaskedField, ScalarField, VectorField, Window};
use crate::sinh_poisson::{certify_strong_regularity, residual, NormalCurvatureField};
use crate::surface::SurfaceS3;

pub type Mat4 = Matrix4<f64>;

/// The four invariants ν₁, ν₂, γ₁, γ₂ on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantData {
    pub nu1: ScalarField,
    pub nu2: ScalarField,
    pub gamma1: ScalarField,
    pub gamma2: ScalarField,
}

impl InvariantData {
    pub fn new(nu1: ScalarField, nu2: ScalarField, gamma1: ScalarField, gamma2: ScalarField) -> Result<Self> {
        same_grid(nu1.grid(), nu2.grid())?;
        same_grid(nu1.grid(), gamma1.grid())?;
        same_grid(nu1.grid(), gamma2.grid())?;
        Ok(InvariantData { nu1, nu2, gamma1, gamma2 })
    }

    pub fn grid(&self) -> &Grid2D {
        self.nu1.grid()
    }

    /// Invariants of the surface determined by ν in canonical principal parameters.
    pub fn canonical(nu: &NormalCurvatureField) -> Result<Self> {
        let (_, _, gamma1, gamma2) = canonical_fields(nu)?;
        let nu1 = nu.field().clone();
        let nu2 = nu1.map(|x| -x)?;
        Self::new(nu1, nu2, gamma1, gamma2)
    }
}

/// (√E, √G, γ₁, γ₂) in canonical parameters; γ by the chain rule
/// `(√ν)_v = ν_v / (2√ν)` from differences of ν.
fn canonical_fields(nu: &NormalCurvatureField) -> Result<(ScalarField, ScalarField, ScalarField, ScalarField)> {
    let f = nu.field();
    let s = f.map(|x| 1.0 / x.sqrt())?;
    let nu_u = partial_u(f)?;
    let nu_v = partial_v(f)?;
    let gamma1 = nu_v.zip_map(f, |d, x| d / (2.0 * x.sqrt()))?;
    let gamma2 = nu_u.zip_map(f, |d, x| -d / (2.0 * x.sqrt()))?;
    Ok((s.clone(), s, gamma1, gamma2))
}

/// Per-node connection matrices of the u- and v-directions.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrices {
    grid: Grid2D,
    pub a: Vec<Mat4>,
    pub b: Vec<Mat4>,
    /// False when (ν₁ − ν₂) γ₁ γ₂ vanishes somewhere (accepted only as a test vector).
    pub strongly_regular: bool,
}

fn assemble(se: f64, sg: f64, nu1: f64, nu2: f64, g1: f64, g2: f64) -> (Mat4, Mat4) {
    #[rustfmt::skip]
    let a = Mat4::new(
        0.0,       se * g1, se * nu1, se,
        -se * g1,  0.0,     0.0,      0.0,
        -se * nu1, 0.0,     0.0,      0.0,
        -se,       0.0,     0.0,      0.0,
    );
    #[rustfmt::skip]
    let b = Mat4::new(
        0.0,      sg * g2,   0.0,      0.0,
        -sg * g2, 0.0,       sg * nu2, sg,
        0.0,      -sg * nu2, 0.0,      0.0,
        0.0,      -sg,       0.0,      0.0,
    );
    (a, b)
}

impl CoefficientMatrices {
    pub fn new(grid: Grid2D, a: Vec<Mat4>, b: Vec<Mat4>) -> Result<Self> {
        if a.len() != grid.len() || b.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} matrices per direction, got {} and {}",
                grid.len(),
                a.len(),
                b.len()
            )));
        }
        Ok(CoefficientMatrices {
            grid,
            a,
            b,
            strongly_regular: false,
        })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        let z = vec![Mat4::zeros(); grid.len()];
        CoefficientMatrices {
            grid,
            a: z.clone(),
            b: z,
            strongly_regular: false,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// max |A + Aᵀ| and |B + Bᵀ| over all nodes and entries.
    pub fn skewness(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|m| (m + m.transpose()).abs().max()).fold(0.0, f64::max)
    }
}

/// Matrices for the surface with canonical principal parameters determined by ν:
/// ν₁ = ν, ν₂ = −ν, γ₁ = (√ν)_v, γ₂ = −(√ν)_u, √E = √G = 1/√ν.
pub fn build_matrices_canonical(nu: &NormalCurvatureField) -> Result<CoefficientMatrices> {
    let (se, sg, g1, g2) = canonical_fields(nu)?;
    let g = *nu.grid();
    let (a, b): (Vec<_>, Vec<_>) = (0..g.len())
        .map(|k| {
            let n = nu.field().values()[k];
            assemble(se.values()[k], sg.values()[k], n, -n, g1.values()[k], g2.values()[k])
        })
        .unzip();
    let mut m = CoefficientMatrices::new(g, a, b)?;
    m.strongly_regular = nu.strong_regularity_margin() > 0.0;
    Ok(m)
}

/// Matrices for general invariants, with √E and √G recovered from the
/// Codazzi relations: √E = (ν₂)_u / (γ₂(ν₁−ν₂)), √G = (ν₁)_v / (γ₁(ν₁−ν₂)).
pub fn build_matrices_general(inv: &InvariantData) -> Result<CoefficientMatrices> {
    let g = *inv.grid();
    let nu1_v = partial_v(&inv.nu1)?;
    let nu2_u = partial_u(&inv.nu2)?;
    let mut a = Vec::with_capacity(g.len());
    let mut b = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        let (n1, n2) = (inv.nu1.values()[k], inv.nu2.values()[k]);
        let (g1, g2) = (inv.gamma1.values()[k], inv.gamma2.values()[k]);
        let diff = n1 - n2;
        if !(diff > 0.0) {
            return Err(Error::Domain {
                i,
                j,
                reason: format!("sign condition violated: nu1 - nu2 = {diff:e} is not positive"),
            });
        }
        let (d1, d2) = (nu1_v.values()[k], nu2_u.values()[k]);
        if !(g1 * d1 > 0.0) {
            return Err(Error::Domain {
                i,
                j,
                reason: format!("sign condition violated: gamma1 (nu1)_v = {:e} is not positive", g1 * d1),
            });
        }
        if !(g2 * d2 > 0.0) {
            return Err(Error::Domain {
                i,
                j,
                reason: format!("sign condition violated: gamma2 (nu2)_u = {:e} is not positive", g2 * d2),
            });
        }
        let se = d2 / (g2 * diff);
        let sg = d1 / (g1 * diff);
        let (ma, mb) = assemble(se, sg, n1, n2, g1, g2);
        a.push(ma);
        b.push(mb);
    }
    let mut m = CoefficientMatrices::new(g, a, b)?;
    m.strongly_regular = true;
    Ok(m)
}

fn matrix_partial(g: &Grid2D, ms: &[Mat4], along_u: bool) -> Result<Vec<Mat4>> {
    let data: Vec<f64> = ms.iter().flat_map(|m| m.iter().copied().collect::<Vec<_>>()).collect();
    let vf = VectorField::new(*g, 16, data)?;
    let d = if along_u { vf.partial_u()? } else { vf.partial_v()? };
    Ok(d.nodes().map(Mat4::from_column_slice).collect())
}

/// Per-node Frobenius norm of `B_u − A_v − (AB − BA)`; interior nodes only.
pub fn compatibility_residual(m: &CoefficientMatrices) -> Result<MaskedField> {
    let g = m.grid;
    let bu = matrix_partial(&g, &m.b, true)?;
    let av = matrix_partial(&g, &m.a, false)?;
    let values = (0..g.len())
        .map(|k| {
            let (a, b) = (&m.a[k], &m.b[k]);
            (bu[k] - av[k] - (a * b - b * a)).norm()
        })
        .collect();
    Ok(MaskedField::interior(ScalarField::new(g, values)?))
}

/// Residuals of the two first-order integrability conditions and of the
/// second-order one (the Gauss equation in terms of invariants), each as left
/// minus right side. Nested differences are first order next to the
/// boundary, so only nodes two or more steps inside are kept.
pub fn existence_conditions(inv: &InvariantData) -> Result<[MaskedField; 3]> {
    let g = *inv.grid();
    let (n1, n2, g1, g2) = (&inv.nu1, &inv.nu2, &inv.gamma1, &inv.gamma2);
    let (n1u, n1v) = (partial_u(n1)?, partial_v(n1)?);
    let (n2u, n2v) = (partial_u(n2)?, partial_v(n2)?);
    let p = n1v.zip_map(g1, |d, c| (d / c).abs().ln())?;
    let q = n2u.zip_map(g2, |d, c| (d / c).abs().ln())?;
    let (pu, qv) = (partial_u(&p)?, partial_v(&q)?);
    let g1sq_v = partial_v(&g1.map(|x| x * x)?)?;
    let g2sq_u = partial_u(&g2.map(|x| x * x)?)?;
    let mut r1 = vec![0.0; g.len()];
    let mut r2 = vec![0.0; g.len()];
    let mut r3 = vec![0.0; g.len()];
    for k in 0..g.len() {
        let d = n1.values()[k] - n2.values()[k];
        r1[k] = pu.values()[k] - n1u.values()[k] / d;
        r2[k] = qv.values()[k] + n2v.values()[k] / d;
        let (a, b) = (g1.values()[k], g2.values()[k]);
        r3[k] =
            0.5 * d * (g1sq_v.values()[k] / n1v.values()[k] - g2sq_u.values()[k] / n2u.values()[k]) - (a * a + b * b) - (1.0 + n1.values()[k] * n2.values()[k]);
    }
    Ok([
        MaskedField::with_margin(ScalarField::new(g, r1)?, 2),
        MaskedField::with_margin(ScalarField::new(g, r2)?, 2),
        MaskedField::with_margin(ScalarField::new(g, r3)?, 2),
    ])
}

/// Orthonormal frames, one per node: rows X, Y, N, l.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    grid: Grid2D,
    frames: Vec<Mat4>,
    /// Largest orthonormality drift seen before any projection.
    pub max_drift: f64,
}

impl FrameField {
    pub fn new(grid: Grid2D, frames: Vec<Mat4>) -> Result<Self> {
        if frames.len() != grid.len() {
            return Err(Error::Dimension(format!("expected {} frames, got {}", grid.len(), frames.len())));
        }
        Ok(FrameField { grid, frames, max_drift: 0.0 })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn at(&self, i: usize, j: usize) -> &Mat4 {
        &self.frames[self.grid.index(i, j)]
    }

    pub fn frames(&self) -> &[Mat4] {
        &self.frames
    }

    /// Row `r` of every frame as a vector field (0 = X, 1 = Y, 2 = N, 3 = l).
    pub fn row(&self, r: usize) -> VectorField {
        let data = self.frames.iter().flat_map(|f| (0..4).map(move |c| f[(r, c)])).collect();
        VectorField::new(self.grid, 4, data).expect("frame rows are finite")
    }
    pub fn x(&self) -> VectorField {
        self.row(0)
    }
    pub fn y(&self) -> VectorField {
        self.row(1)
    }
    pub fn n(&self) -> VectorField {
        self.row(2)
    }
    pub fn l(&self) -> VectorField {
        self.row(3)
    }

    /// max over nodes of max |F Fᵀ − I|.
    pub fn gram_deviation(&self) -> f64 {
        self.frames.iter().map(orthonormality_drift).fold(0.0, f64::max)
    }

    pub fn det_range(&self) -> (f64, f64) {
        self.frames
            .iter()
            .map(|f| f.determinant())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    pub fn restrict(&self, w: &Window) -> Result<Self> {
        let g = self.grid.subgrid(w)?;
        let frames = w.nodes().map(|(i, j)| *self.at(i, j)).collect();
        Ok(FrameField {
            grid: g,
            frames,
            max_drift: self.max_drift,
        })
    }
}

pub fn orthonormality_drift(f: &Mat4) -> f64 {
    (f * f.transpose() - Mat4::identity()).abs().max()
}

/// Modified Gram-Schmidt on the rows, in the order X, Y, N, l.
pub fn project_to_so4(f: &Mat4) -> Mat4 {
    let mut out = *f;
    for r in 0..4 {
        let mut row = out.row(r).into_owned();
        for p in 0..r {
            let q = out.row(p).into_owned();
            row -= q * row.dot(&q);
        }
        out.set_row(r, &(row / row.norm()));
    }
    out
}

/// Validate a user-supplied initial frame.
pub fn check_initial_frame(f: &Mat4) -> Result<()> {
    let drift = orthonormality_drift(f);
    if drift > 1e-12 {
        return Err(Error::InvalidParameter(format!("initial frame is not orthonormal (drift {drift:e})")));
    }
    if f.determinant() < 0.0 {
        return Err(Error::InvalidParameter("initial frame is not right-oriented".into()));
    }
    Ok(())
}

/// Order of the two sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sweep {
    /// Along the initial row in u, then every column in v.
    RowFirst,
    /// Along the initial column in v, then every row in u.
    ColumnFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub sweep: Sweep,
    /// Per-step orthonormality drift (before projection) that aborts the sweep.
    pub drift_limit: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            sweep: Sweep::RowFirst,
            drift_limit: 1e-3,
        }
    }
}

/// Cubic Lagrange value of `line` halfway between nodes `k` and `k + 1`.
fn midpoint(line: &[Mat4], k: usize) -> Mat4 {
    let n = line.len();
    if n < 4 {
        return (line[k] + line[k + 1]) * 0.5;
    }
    let s = k.saturating_sub(1).min(n - 4);
    // nodes s..s+4 at offsets relative to k + 1/2
    let x = 0.5 + (k - s) as f64;
    let w = |m: usize| {
        let mut p = 1.0;
        for q in 0..4 {
            if q != m {
                p *= (x - q as f64) / (m as f64 - q as f64);
            }
        }
        p
    };
    line[s] * w(0) + line[s + 1] * w(1) + line[s + 2] * w(2) + line[s + 3] * w(3)
}

/// Transport `start` (at `line[k0]`) along a line of generators with RK4.
/// Returns frames at every node of the line and the largest drift.
fn sweep_line(line: &[Mat4], k0: usize, start: Mat4, h: f64, limit: f64) -> std::result::Result<(Vec<Mat4>, f64), (usize, f64)> {
    let n = line.len();
    let mut out = vec![Mat4::zeros(); n];
    out[k0] = start;
    let mut worst: f64 = 0.0;
    let mut step = |from: Mat4, a0: &Mat4, am: &Mat4, a1: &Mat4, h: f64, at: usize| {
        let k1 = a0 * from;
        let k2 = am * (from + k1 * (0.5 * h));
        let k3 = am * (from + k2 * (0.5 * h));
        let k4 = a1 * (from + k3 * h);
        let next = from + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let drift = orthonormality_drift(&next);
        worst = worst.max(drift);
        if !(drift <= limit) {
            return Err((at, drift));
        }
        Ok(project_to_so4(&next))
    };
    for k in k0..n - 1 {
        out[k + 1] = step(out[k], &line[k], &midpoint(line, k), &line[k + 1], h, k + 1)?;
    }
    for k in (1..=k0).rev() {
        out[k - 1] = step(out[k], &line[k], &midpoint(line, k - 1), &line[k - 1], -h, k - 1)?;
    }
    Ok((out, worst))
}

/// Integrate `F_u = A F`, `F_v = B F` from `initial` at node `origin`.
pub fn integrate_frame(m: &CoefficientMatrices, initial: &Mat4, origin: (usize, usize), opts: &IntegrateOptions) -> Result<FrameField> {
    check_initial_frame(initial)?;
    let g = m.grid;
    let (i0, j0) = origin;
    if i0 >= g.nu() || j0 >= g.nv() {
        return Err(Error::InvalidParameter(format!("origin ({i0}, {j0}) outside the grid")));
    }
    let limit = opts.drift_limit;
    let (first, first_h, first_k, second, second_h, n_lines, n_along) = match opts.sweep {
        Sweep::RowFirst => (&m.a, g.hu(), i0, &m.b, g.hv(), g.nu(), g.nv()),
        Sweep::ColumnFirst => (&m.b, g.hv(), j0, &m.a, g.hu(), g.nv(), g.nu()),
    };
    let row_first = opts.sweep == Sweep::RowFirst;
    // node index of position `k` on the first line / of position `k` on second line `l`
    let first_idx = |k: usize| if row_first { g.index(k, j0) } else { g.index(i0, k) };
    let second_idx = |l: usize, k: usize| if row_first { g.index(l, k) } else { g.index(k, l) };
    let second_k0 = if row_first { j0 } else { i0 };

    let fail = |at: (usize, usize), drift: f64| Error::StepFailure {
        i: at.0,
        j: at.1,
        drift,
        limit,
    };
    let line: Vec<Mat4> = (0..n_lines).map(|k| first[first_idx(k)]).collect();
    let (base, mut worst) = sweep_line(&line, first_k, *initial, first_h, limit).map_err(|(k, d)| {
        let at = if row_first { (k, j0) } else { (i0, k) };
        fail(at, d)
    })?;
    let columns: Vec<_> = (0..n_lines)
        .into_par_iter()
        .map(|l| {
            let line: Vec<Mat4> = (0..n_along).map(|k| second[second_idx(l, k)]).collect();
            sweep_line(&line, second_k0, base[l], second_h, limit).map_err(|(k, d)| {
                let at = if row_first { (l, k) } else { (k, l) };
                fail(at, d)
            })
        })
        .collect::<Result<_>>()?;
    let mut frames = vec![Mat4::zeros(); g.len()];
    for (l, (col, w)) in columns.into_iter().enumerate() {
        worst = worst.max(w);
        for (k, f) in col.into_iter().enumerate() {
            frames[second_idx(l, k)] = f;
        }
    }
    let mut ff = FrameField::new(g, frames)?;
    ff.max_drift = worst;
    Ok(ff)
}

/// Gates applied before any integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Gate on max |residual(ν)|; `None` means 10 h².
    pub residual_gate: Option<f64>,
    /// Gate on the compatibility residual; `None` means 10 h².
    pub compatibility_gate: Option<f64>,
    /// Demand ν_u ν_v ≠ 0 on the window.
    pub require_strong_regularity: bool,
    pub integrate: IntegrateOptions,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            residual_gate: None,
            compatibility_gate: None,
            require_strong_regularity: true,
            integrate: IntegrateOptions::default(),
        }
    }
}

/// Default gate 10 h² for second-order residuals.
pub fn default_gate(g: &Grid2D) -> f64 {
    10.0 * g.h_max() * g.h_max()
}

/// Outcome of a reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub frames: FrameField,
    pub surface: SurfaceS3,
    pub matrices: CoefficientMatrices,
    pub window: Window,
    pub sinh_poisson_residual: f64,
    pub compatibility_residual: f64,
    pub regularity_margin: f64,
}

/// Largest centered window on which ν passes the residual, compatibility and
/// strong-regularity gates; `None` if none of at least 3×3 nodes does.
pub fn certified_window(nu: &NormalCurvatureField, opts: &ReconstructOptions) -> Result<Option<Window>> {
    let g = *nu.grid();
    let res = residual(nu)?;
    let comp = compatibility_residual(&build_matrices_canonical(nu)?)?;
    let rg = opts.residual_gate.unwrap_or_else(|| default_gate(&g));
    let cg = opts.compatibility_gate.unwrap_or_else(|| default_gate(&g));
    let mut k = 0;
    while let Some(w) = g.full_window().shrink(k) {
        if w.i_max - w.i_min < 2 || w.j_max - w.j_min < 2 {
            break;
        }
        let ok_res = res.max_abs_in(&w) < rg && comp.max_abs_in(&w) < cg;
        let ok_reg = !opts.require_strong_regularity || certify_strong_regularity(nu, &w)? > 0.0;
        if ok_res && ok_reg {
            return Ok(Some(w));
        }
        k += 1;
    }
    Ok(None)
}

/// Compose the canonical matrices and frame integration; `initial` is placed
/// at `origin` (the grid center when `None`).
pub fn reconstruct_surface(nu: &NormalCurvatureField, initial: &Mat4, origin: Option<(usize, usize)>, opts: &ReconstructOptions) -> Result<Reconstruction> {
    let g = *nu.grid();
    let origin = origin.unwrap_or_else(|| g.center());
    let res = residual(nu)?;
    let matrices = build_matrices_canonical(nu)?;
    let comp = compatibility_residual(&matrices)?;
    let window = certified_window(nu, opts)?;
    let rg = opts.residual_gate.unwrap_or_else(|| default_gate(&g));
    let cg = opts.compatibility_gate.unwrap_or_else(|| default_gate(&g));
    let Some(window) = window else {
        let r = res.max_abs();
        if !(r < rg) {
            return Err(Error::Gate {
                name: "sinh_poisson_residual".into(),
                value: r,
                gate: rg,
            });
        }
        let c = comp.max_abs();
        if !(c < cg) {
            return Err(Error::Gate {
                name: "compatibility_residual".into(),
                value: c,
                gate: cg,
            });
        }
        return Err(Error::Regularity("nu_u nu_v vanishes on every centered window".into()));
    };
    let frames = integrate_frame(&matrices, initial, origin, &opts.integrate)?;
    let surface = SurfaceS3::new(frames.l(), None)?;
    let margin = certify_strong_regularity(nu, &window)?;
    Ok(Reconstruction {
        sinh_poisson_residual: res.max_abs_in(&window),
        compatibility_residual: comp.max_abs_in(&window),
        regularity_margin: margin,
        frames,
        surface,
        matrices,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::PlaneWave;

    fn ones(n: usize) -> NormalCurvatureField {
        NormalCurvatureField::new(ScalarField::constant(Grid2D::square(-0.5, 0.5, n).unwrap(), 1.0)).unwrap()
    }

    #[test]
    fn constant_nu_matrices_read_off_the_frame_system() {
        let m = build_matrices_canonical(&ones(9)).unwrap();
        assert!(!m.strongly_regular);
        let (a, b) = (m.a[40], m.b[40]);
        #[rustfmt::skip]
        let ea = Mat4::new(
            0.0, 0.0, 1.0, 1.0,
            0.0, 0.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
        );
        #[rustfmt::skip]
        let eb = Mat4::new(
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, -1.0, 1.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        );
        assert_eq!(a, ea);
        assert_eq!(b, eb);
        // hand computation: both products vanish, so the commutator is zero
        assert_eq!(a * b, Mat4::zeros());
        assert_eq!(b * a, Mat4::zeros());
        assert_eq!(compatibility_residual(&m).unwrap().max_abs(), 0.0);
        assert_eq!(m.skewness(), 0.0);
    }

    #[test]
    fn zero_matrices_leave_the_frame_fixed() {
        let g = Grid2D::square(0.0, 1.0, 7).unwrap();
        let m = CoefficientMatrices::zeros(g);
        assert_eq!(compatibility_residual(&m).unwrap().max_abs(), 0.0);
        let f0 = project_to_so4(&Mat4::new(1.0, 0.2, 0.0, 0.1, 0.0, 1.0, 0.3, 0.0, 0.1, 0.0, 1.0, 0.0, 0.0, 0.0, 0.2, 1.0));
        let ff = integrate_frame(&m, &f0, (2, 3), &IntegrateOptions::default()).unwrap();
        for f in ff.frames() {
            assert!((f - f0).abs().max() < 1e-15);
        }
        assert_eq!(*ff.at(2, 3), f0);
    }

    #[test]
    fn general_assembly_round_trips_canonical_data() {
        let w = PlaneWave::standard();
        let nu = w.nu_field(Grid2D::square(-0.5, 0.5, 41).unwrap()).unwrap();
        let mc = build_matrices_canonical(&nu).unwrap();
        assert!(mc.strongly_regular);
        let mg = build_matrices_general(&InvariantData::canonical(&nu).unwrap()).unwrap();
        let err =
            mc.a.iter()
                .zip(&mg.a)
                .chain(mc.b.iter().zip(&mg.b))
                .map(|(x, y)| (x - y).abs().max())
                .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!(mg.skewness() < 1e-13);
    }

    #[test]
    fn general_assembly_rejects_sign_violations() {
        let w = PlaneWave::standard();
        let g = Grid2D::square(-0.5, 0.5, 11).unwrap();
        let inv = InvariantData::canonical(&w.nu_field(g).unwrap()).unwrap();
        let swapped = InvariantData::new(inv.nu2.clone(), inv.nu1.clone(), inv.gamma1.clone(), inv.gamma2.clone()).unwrap();
        let e = build_matrices_general(&swapped).unwrap_err();
        assert!(e.to_string().contains("nu1 - nu2"), "{e}");
        let mut g1 = inv.gamma1.values().to_vec();
        g1[g.index(4, 5)] *= -1.0;
        let bad = InvariantData::new(inv.nu1.clone(), inv.nu2.clone(), ScalarField::new(g, g1).unwrap(), inv.gamma2.clone()).unwrap();
        match build_matrices_general(&bad).unwrap_err() {
            Error::Domain { i, j, reason } => {
                assert_eq!((i, j), (4, 5));
                assert!(reason.contains("sign condition") && reason.contains("gamma1"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn existence_conditions_hold_for_exact_solutions() {
        let w = PlaneWave::standard();
        let mut prev: Option<f64> = None;
        for n in [21, 41, 81] {
            let inv = InvariantData::canonical(&w.nu_field(Grid2D::square(-0.5, 0.5, n).unwrap()).unwrap()).unwrap();
            let worst = existence_conditions(&inv).unwrap().iter().map(|r| r.max_abs()).fold(0.0, f64::max);
            if let Some(p) = prev {
                assert!(p / worst > 3.0, "{p} -> {worst}");
            }
            prev = Some(worst);
        }
        assert!(prev.unwrap() < 1e-2);
    }

    #[test]
    fn clifford_frame_matches_matrix_exponential() {
        let nu = ones(101);
        let g = *nu.grid();
        let rec = reconstruct_surface(
            &nu,
            &Mat4::identity(),
            None,
            &ReconstructOptions {
                require_strong_regularity: false,
                ..Default::default()
            },
        )
        .unwrap();
        let m = &rec.matrices;
        let (a, b) = (m.a[0], m.b[0]);
        let (ic, jc) = g.center();
        let mut err: f64 = 0.0;
        for (i, j) in g.full_window().nodes() {
            let du = g.u(i) - g.u(ic);
            let dv = g.v(j) - g.v(jc);
            let exact = (a * du).exp() * (b * dv).exp();
            err = err.max((rec.frames.at(i, j) - exact).abs().max());
        }
        assert!(err < 1e-8, "{err}");
        assert!(rec.frames.gram_deviation() < 1e-12);
    }

    #[test]
    fn drift_limit_reports_the_node() {
        let g = Grid2D::square(0.0, 1.0, 5).unwrap();
        let mut m = CoefficientMatrices::zeros(g);
        for a in &mut m.a {
            a[(0, 1)] = 50.0;
            a[(1, 0)] = -50.0;
        }
        let e = integrate_frame(&m, &Mat4::identity(), (0, 0), &IntegrateOptions::default()).unwrap_err();
        assert!(matches!(e, Error::StepFailure { i: 1, j: 0, .. }), "{e}");
    }

    #[test]
    fn failing_residual_gate_rejects_before_integration() {
        let nu = NormalCurvatureField::new(ScalarField::constant(Grid2D::square(0.0, 1.0, 11).unwrap(), 2.0)).unwrap();
        let e = reconstruct_surface(&nu, &Mat4::identity(), None, &ReconstructOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Gate { ref name, .. } if name == "sinh_poisson_residual"), "{e}");
    }
}
