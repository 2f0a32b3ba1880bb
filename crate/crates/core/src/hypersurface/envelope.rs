use nalgebra::DVector;

use super::spectrum::{derivatives, tangent_normal};
use super::{complement_seeded, HypersurfaceMap};
use crate::error::{Error, Result};
use crate::grid::{Grid2D, MaskedField, ScalarField, VectorField};

/// Smallest W² = EG − F² accepted as a regular envelope.
pub const W2_MIN: f64 = 1e-12;

/// Envelope data of a type-number-two hypersurface on a grid: hyperplane
/// normal l, oriented distance r, the Gram coefficients of (l_u, l_v) and an
/// orthonormal basis b_α of the complement of span{l, l_u, l_v}.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceChart {
    pub n: usize,
    pub l: VectorField,
    pub r: ScalarField,
    pub l_u: VectorField,
    pub l_v: VectorField,
    pub e: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
    pub w2: ScalarField,
    pub basis: Vec<VectorField>,
}

impl HypersurfaceChart {
    /// Assembles a chart from l and r, completing the basis by Gram-Schmidt
    /// seeded from the neighbouring node (rows swept outward from `base`).
    pub fn new(n: usize, l: VectorField, r: ScalarField, base: (usize, usize)) -> Result<Self> {
        let grid = *l.grid();
        if l.dim() != n + 1 {
            return Err(Error::Dimension(format!("l has {} components, expected {}", l.dim(), n + 1)));
        }
        if r.grid() != &grid {
            return Err(Error::Dimension("l and r live on different grids".into()));
        }
        for k in 0..grid.len() {
            let norm = l.at_index(k).iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-8 {
                let (i, j) = grid.node(k);
                return Err(Error::Domain {
                    i,
                    j,
                    reason: format!("|l| = {norm}"),
                });
            }
        }
        let (l_u, l_v) = (l.partial_u()?, l.partial_v()?);
        let (e, f, g) = (l_u.dot(&l_u)?, l_u.dot(&l_v)?, l_v.dot(&l_v)?);
        let w2 = e.zip_map(&g, |a, b| a * b)?.zip_map(&f, |p, c| p - c * c)?;
        for k in 0..grid.len() {
            let (i, j) = grid.node(k);
            let (ek, gk, wk) = (e.values()[k], g.values()[k], w2.values()[k]);
            if !(ek > 0.0 && gk > 0.0 && wk > W2_MIN) {
                return Err(Error::DegenerateEnvelope { i, j, w2: wk });
            }
        }
        let basis = propagate_basis(&grid, n, &l, &l_u, &l_v, base)?;
        Ok(HypersurfaceChart {
            n,
            l,
            r,
            l_u,
            l_v,
            e,
            f,
            g,
            w2,
            basis,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        self.l.grid()
    }

    /// Largest of |b_α·b_β − δ_αβ| and |b_α·l|, |b_α·l_u|, |b_α·l_v| over the grid.
    pub fn basis_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.grid().len() {
            let bs: Vec<&[f64]> = self.basis.iter().map(|b| b.at_index(k)).collect();
            let span = [self.l.at_index(k), self.l_u.at_index(k), self.l_v.at_index(k)];
            for (a, ba) in bs.iter().enumerate() {
                for (b, bb) in bs.iter().enumerate() {
                    let ip = dot(ba, bb) - if a == b { 1.0 } else { 0.0 };
                    worst = worst.max(ip.abs());
                }
                for s in &span {
                    worst = worst.max(dot(ba, s).abs() / norm(s).max(1e-300));
                }
            }
        }
        worst
    }

    /// Largest relative conformality defect max(|E − G|, |F|) / ((E + G) / 2).
    pub fn conformality_defect(&self) -> f64 {
        let (e, f, g) = (self.e.values(), self.f.values(), self.g.values());
        (0..e.len())
            .map(|k| (e[k] - g[k]).abs().max(f[k].abs()) / (0.5 * (e[k] + g[k])))
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn propagate_basis(grid: &Grid2D, n: usize, l: &VectorField, l_u: &VectorField, l_v: &VectorField, base: (usize, usize)) -> Result<Vec<VectorField>> {
    let count = n - 2;
    let dim = n + 1;
    let (nu, nv) = (grid.nu(), grid.nv());
    if base.0 >= nu || base.1 >= nv {
        return Err(Error::InvalidParameter(format!("base node {base:?} outside the grid")));
    }
    let mut nodes: Vec<Option<Vec<DVector<f64>>>> = vec![None; grid.len()];
    let at = |f: &VectorField, i: usize, j: usize| DVector::from_column_slice(f.at(i, j));
    let solve = |i: usize, j: usize, seeds: &[DVector<f64>]| -> Result<Vec<DVector<f64>>> {
        let span = [at(l, i, j), at(l_u, i, j), at(l_v, i, j)];
        let b = complement_seeded(&span, seeds, count);
        if b.len() != count {
            return Err(Error::DegenerateEnvelope { i, j, w2: 0.0 });
        }
        Ok(b)
    };
    let (i0, j0) = base;
    nodes[grid.index(i0, j0)] = Some(solve(i0, j0, &[])?);
    let order_from = |start: usize, len: usize| (start + 1..len).map(move |k| (k, k - 1)).chain((0..start).rev().map(|k| (k, k + 1)));
    for (i, prev) in order_from(i0, nu) {
        let seeds = nodes[grid.index(prev, j0)].clone().unwrap();
        nodes[grid.index(i, j0)] = Some(solve(i, j0, &seeds)?);
    }
    for i in 0..nu {
        for (j, prev) in order_from(j0, nv) {
            let seeds = nodes[grid.index(i, prev)].clone().unwrap();
            nodes[grid.index(i, j)] = Some(solve(i, j, &seeds)?);
        }
    }
    let nodes: Vec<Vec<DVector<f64>>> = nodes.into_iter().map(|b| b.unwrap()).collect();
    (0..count)
        .map(|a| {
            let per: Vec<Vec<f64>> = nodes.iter().map(|b| b[a].as_slice().to_vec()).collect();
            VectorField::from_nodes(*grid, dim, &per)
        })
        .collect()
}

/// Envelope data of a map with an analytic normal, sampled at w = 0.
/// l is oriented so that r ≥ 0 at `base`; if r vanishes there, the first
/// nonzero component of l is made positive.
pub fn extract_chart(map: &dyn HypersurfaceMap, grid: Grid2D, base: (usize, usize)) -> Result<HypersurfaceChart> {
    let n = map.n();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("hypersurface dimension must be at least 3, got {n}")));
    }
    let mut ls = Vec::with_capacity(grid.len());
    let mut rs = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let (u, v) = grid.coords(grid.node(k).0, grid.node(k).1);
        let mut p = vec![0.0; n];
        p[0] = u;
        p[1] = v;
        let nrm = map
            .normal(&p)
            .ok_or_else(|| Error::InvalidParameter("chart extraction needs a map with an analytic normal".into()))?;
        rs.push(map.eval(&p).dot(&nrm));
        ls.push(nrm.as_slice().to_vec());
    }
    if base.0 >= grid.nu() || base.1 >= grid.nv() {
        return Err(Error::InvalidParameter(format!("base node {base:?} outside the grid")));
    }
    let kb = grid.index(base.0, base.1);
    let scale = rs.iter().fold(0.0f64, |a, r| a.max(r.abs())).max(1.0);
    let flip = if rs[kb].abs() > 1e-12 * scale {
        rs[kb] < 0.0
    } else {
        ls[kb].iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0)
    };
    if flip {
        rs.iter_mut().for_each(|r| *r = -*r);
        ls.iter_mut().flatten().for_each(|c| *c = -*c);
    }
    let l = VectorField::from_nodes(grid, n + 1, &ls)?;
    let r = ScalarField::new(grid, rs)?;
    HypersurfaceChart::new(n, l, r, base)
}

/// Point X(u_i, v_j, w) of the envelope parameterization, with r_u, r_v from
/// finite differences on the chart grid.
pub fn envelope_point(chart: &HypersurfaceChart, i: usize, j: usize, w: &[f64]) -> Result<DVector<f64>> {
    let grid = chart.grid();
    if i >= grid.nu() || j >= grid.nv() {
        return Err(Error::InvalidParameter(format!("node ({i}, {j}) outside the grid")));
    }
    if w.len() != chart.basis.len() {
        return Err(Error::Dimension(format!("{} ruling coordinates, expected {}", w.len(), chart.basis.len())));
    }
    let (e, f, g, w2) = (chart.e.at(i, j), chart.f.at(i, j), chart.g.at(i, j), chart.w2.at(i, j));
    if !(w2 > W2_MIN) {
        return Err(Error::DegenerateEnvelope { i, j, w2 });
    }
    let r_u = crate::grid::partial_u(&chart.r)?.at(i, j);
    let r_v = crate::grid::partial_v(&chart.r)?.at(i, j);
    let v = |f: &VectorField| DVector::from_column_slice(f.at(i, j));
    let mut x = v(&chart.l) * chart.r.at(i, j) + v(&chart.l_u) * ((g * r_u - f * r_v) / w2) + v(&chart.l_v) * ((e * r_v - f * r_u) / w2);
    for (wa, b) in w.iter().zip(&chart.basis) {
        x.axpy(*wa, &v(b), 1.0);
    }
    Ok(x)
}

/// Largest distance between finite-difference unit normals along the
/// generator through (u, v), over the given ruling coordinates.
pub fn normal_constancy(map: &dyn HypersurfaceMap, uv: (f64, f64), w_samples: &[Vec<f64>], step: f64) -> Result<f64> {
    let n = map.n();
    let normal_at = |w: &[f64]| -> Result<DVector<f64>> {
        if w.len() != n - 2 {
            return Err(Error::Dimension(format!("{} ruling coordinates, expected {}", w.len(), n - 2)));
        }
        let mut p = vec![uv.0, uv.1];
        p.extend_from_slice(w);
        tangent_normal(&derivatives(map, &p, step).jacobian)
    };
    let reference = normal_at(&vec![0.0; n - 2])?;
    let mut worst: f64 = 0.0;
    for w in w_samples {
        let nw = normal_at(w)?;
        worst = worst.max((&nw - &reference).norm().min((&nw + &reference).norm()));
    }
    Ok(worst)
}

fn check_conformal(chart: &HypersurfaceChart, tol: f64) -> Result<()> {
    let defect = chart.conformality_defect();
    if !(defect <= tol) {
        return Err(Error::Conformality { defect, tol });
    }
    Ok(())
}

fn node_norms(grid: Grid2D, dim: usize, data: impl Fn(usize, usize) -> f64) -> Result<MaskedField> {
    let vals = (0..grid.len()).map(|k| (0..dim).map(|c| data(k, c).powi(2)).sum::<f64>().sqrt()).collect();
    // E_u, E_v nest two differences: first order next to the boundary
    Ok(MaskedField::with_margin(ScalarField::new(grid, vals)?, 2))
}

/// Residual norms of the bi-umbilical system
/// l_uu − l_vv = (E_u/E) l_u − (E_v/E) l_v, 2 l_uv = (E_v/E) l_u + (E_u/E) l_v and
/// the same two equations for r. Requires conformality to `tol`.
pub fn biumbilical_system_residual(chart: &HypersurfaceChart, tol: f64) -> Result<[MaskedField; 4]> {
    check_conformal(chart, tol)?;
    biumbilical_system_residual_unchecked(chart)
}

/// [`biumbilical_system_residual`] without the conformality check.
pub fn biumbilical_system_residual_unchecked(chart: &HypersurfaceChart) -> Result<[MaskedField; 4]> {
    let grid = *chart.grid();
    let dim = chart.l.dim();
    let (luu, lvv, luv) = (chart.l.partial_uu()?, chart.l.partial_vv()?, chart.l.partial_uv()?);
    let (lu, lv) = (chart.l_u.data(), chart.l_v.data());
    let eu = crate::grid::partial_u(&chart.e)?;
    let ev = crate::grid::partial_v(&chart.e)?;
    let a = |k: usize| eu.values()[k] / chart.e.values()[k];
    let b = |k: usize| ev.values()[k] / chart.e.values()[k];
    let first = node_norms(grid, dim, |k, c| {
        let m = k * dim + c;
        luu.data()[m] - lvv.data()[m] - a(k) * lu[m] + b(k) * lv[m]
    })?;
    let second = node_norms(grid, dim, |k, c| {
        let m = k * dim + c;
        2.0 * luv.data()[m] - b(k) * lu[m] - a(k) * lv[m]
    })?;
    let r = &chart.r;
    let (ru, rv) = (crate::grid::partial_u(r)?, crate::grid::partial_v(r)?);
    let (ruu, rvv, ruv) = (crate::grid::partial_uu(r)?, crate::grid::partial_vv(r)?, crate::grid::partial_uv(r)?);
    let third = node_norms(grid, 1, |k, _| {
        ruu.values()[k] - rvv.values()[k] - a(k) * ru.values()[k] + b(k) * rv.values()[k]
    })?;
    let fourth = node_norms(grid, 1, |k, _| 2.0 * ruv.values()[k] - b(k) * ru.values()[k] - a(k) * rv.values()[k])?;
    Ok([first, second, third, fourth])
}

/// Residual norms of l_uu + l_vv + 2E l = 0 and r_uu + r_vv + 2E r = 0.
/// Requires conformality to `tol`.
pub fn minimal_system_residual(chart: &HypersurfaceChart, tol: f64) -> Result<[MaskedField; 2]> {
    check_conformal(chart, tol)?;
    minimal_system_residual_unchecked(chart)
}

/// [`minimal_system_residual`] without the conformality check.
pub fn minimal_system_residual_unchecked(chart: &HypersurfaceChart) -> Result<[MaskedField; 2]> {
    let grid = *chart.grid();
    let dim = chart.l.dim();
    let (luu, lvv) = (chart.l.partial_uu()?, chart.l.partial_vv()?);
    let e = chart.e.values();
    let l = chart.l.data();
    let first = node_norms(grid, dim, |k, c| {
        let m = k * dim + c;
        luu.data()[m] + lvv.data()[m] + 2.0 * e[k] * l[m]
    })?;
    let r = &chart.r;
    let (ruu, rvv) = (crate::grid::partial_uu(r)?, crate::grid::partial_vv(r)?);
    let second = node_norms(grid, 1, |k, _| ruu.values()[k] + rvv.values()[k] + 2.0 * e[k] * r.values()[k])?;
    Ok([first, second])
}
