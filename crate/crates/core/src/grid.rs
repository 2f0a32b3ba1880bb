//! Uniform parametric grids, node-sampled fields and finite-difference calculus.
//!
//! Nodes are stored row-major in `u`: node `(i, j)` lives at flat index
//! `j * nu + i`, so `u` varies fastest. First derivatives use second-order
//! central differences in the interior and four-point second-order one-sided
//! closures on the boundary; second derivatives use the three-point stencil
//! with a four-point second-order closure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rectangular parameter domain `[u_min, u_max] x [v_min, v_max]` with `nu x nv` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid2D {
    u_min: f64,
    u_max: f64,
    v_min: f64,
    v_max: f64,
    nu: usize,
    nv: usize,
    hu: f64,
    hv: f64,
}

/// Serialized form of [`Grid2D`]; spacings are derived on load.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub nu: usize,
    pub nv: usize,
}

impl TryFrom<GridSpec> for Grid2D {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        Grid2D::new(s.u_min, s.u_max, s.nu, s.v_min, s.v_max, s.nv)
    }
}

impl From<Grid2D> for GridSpec {
    fn from(g: Grid2D) -> Self {
        GridSpec {
            u_min: g.u_min,
            u_max: g.u_max,
            v_min: g.v_min,
            v_max: g.v_max,
            nu: g.nu,
            nv: g.nv,
        }
    }
}

impl Grid2D {
    pub fn new(u_min: f64, u_max: f64, nu: usize, v_min: f64, v_max: f64, nv: usize) -> Result<Self> {
        if nu < 3 || nv < 3 {
            return Err(Error::Dimension(format!("grid needs at least 3 nodes per axis, got {nu} x {nv}")));
        }
        let finite = [u_min, u_max, v_min, v_max].iter().all(|x| x.is_finite());
        if !finite || u_max <= u_min || v_max <= v_min {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must be finite and increasing: [{u_min}, {u_max}] x [{v_min}, {v_max}]"
            )));
        }
        Ok(Grid2D {
            u_min,
            u_max,
            v_min,
            v_max,
            nu,
            nv,
            hu: (u_max - u_min) / (nu - 1) as f64,
            hv: (v_max - v_min) / (nv - 1) as f64,
        })
    }

    /// Square grid `[lo, hi]^2` with `n` nodes per axis.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(lo, hi, n, lo, hi, n)
    }

    pub fn u_min(&self) -> f64 {
        self.u_min
    }
    pub fn u_max(&self) -> f64 {
        self.u_max
    }
    pub fn v_min(&self) -> f64 {
        self.v_min
    }
    pub fn v_max(&self) -> f64 {
        self.v_max
    }
    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn nv(&self) -> usize {
        self.nv
    }
    pub fn hu(&self) -> f64 {
        self.hu
    }
    pub fn hv(&self) -> f64 {
        self.hv
    }

    /// Larger of the two spacings; the `h` in `C h^2` gates.
    pub fn h_max(&self) -> f64 {
        self.hu.max(self.hv)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nu && j < self.nv);
        j * self.nu + i
    }

    #[inline]
    pub fn node(&self, k: usize) -> (usize, usize) {
        (k % self.nu, k / self.nu)
    }

    #[inline]
    pub fn u(&self, i: usize) -> f64 {
        self.u_min + i as f64 * self.hu
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        self.v_min + j as f64 * self.hv
    }

    #[inline]
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u(i), self.v(j))
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nu && j + 1 < self.nv
    }

    pub fn center(&self) -> (usize, usize) {
        (self.nu / 2, self.nv / 2)
    }

    pub fn contains(&self, u: f64, v: f64, slack: f64) -> bool {
        u >= self.u_min - slack && u <= self.u_max + slack && v >= self.v_min - slack && v <= self.v_max + slack
    }

    pub fn full_window(&self) -> Window {
        Window {
            i_min: 0,
            i_max: self.nu - 1,
            j_min: 0,
            j_max: self.nv - 1,
        }
    }

    /// Smallest node window covering the parameter rectangle `[u0, u1] x [v0, v1]`.
    pub fn window_covering(&self, u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Window> {
        let eps = 1e-9;
        if !(self.contains(u0, v0, eps) && self.contains(u1, v1, eps)) || u1 < u0 || v1 < v0 {
            return Err(Error::InvalidParameter(format!("window [{u0}, {u1}] x [{v0}, {v1}] is not inside the grid")));
        }
        let to_i = |u: f64, up: bool| {
            let x = (u - self.u_min) / self.hu;
            let k = if up { (x - eps).ceil() } else { (x + eps).floor() };
            (k.max(0.0) as usize).min(self.nu - 1)
        };
        let to_j = |v: f64, up: bool| {
            let x = (v - self.v_min) / self.hv;
            let k = if up { (x - eps).ceil() } else { (x + eps).floor() };
            (k.max(0.0) as usize).min(self.nv - 1)
        };
        Window::new(self, to_i(u0, false), to_i(u1, true), to_j(v0, false), to_j(v1, true))
    }

    /// Sub-grid spanned by a window (spacings are preserved).
    pub fn subgrid(&self, w: &Window) -> Result<Grid2D> {
        Grid2D::new(
            self.u(w.i_min),
            self.u(w.i_max),
            w.i_max - w.i_min + 1,
            self.v(w.j_min),
            self.v(w.j_max),
            w.j_max - w.j_min + 1,
        )
    }

    /// Every other node of a grid with odd node counts: spacing doubles,
    /// corners are kept.
    pub fn coarsened(&self) -> Result<Grid2D> {
        if self.nu.is_multiple_of(2) || self.nv.is_multiple_of(2) || self.nu < 5 || self.nv < 5 {
            return Err(Error::InvalidParameter(format!(
                "coarsening needs odd node counts of at least 5, got {} x {}",
                self.nu, self.nv
            )));
        }
        Grid2D::new(self.u_min, self.u_max, self.nu / 2 + 1, self.v_min, self.v_max, self.nv / 2 + 1)
    }
}

/// Inclusive rectangle of node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub i_min: usize,
    pub i_max: usize,
    pub j_min: usize,
    pub j_max: usize,
}

impl Window {
    pub fn new(grid: &Grid2D, i_min: usize, i_max: usize, j_min: usize, j_max: usize) -> Result<Self> {
        if i_min > i_max || j_min > j_max || i_max >= grid.nu() || j_max >= grid.nv() {
            return Err(Error::InvalidParameter(format!(
                "window i {i_min}..={i_max}, j {j_min}..={j_max} outside {}x{} grid",
                grid.nu(),
                grid.nv()
            )));
        }
        Ok(Window { i_min, i_max, j_min, j_max })
    }

    /// Window shrunk by `k` nodes on every side, if anything is left.
    pub fn shrink(&self, k: usize) -> Option<Window> {
        if self.i_min + k > self.i_max.checked_sub(k)? || self.j_min + k > self.j_max.checked_sub(k)? {
            return None;
        }
        Some(Window {
            i_min: self.i_min + k,
            i_max: self.i_max - k,
            j_min: self.j_min + k,
            j_max: self.j_max - k,
        })
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.i_min && i <= self.i_max && j >= self.j_min && j <= self.j_max
    }

    /// Nodes strictly inside the window.
    pub fn contains_interior(&self, i: usize, j: usize) -> bool {
        i > self.i_min && i < self.i_max && j > self.j_min && j < self.j_max
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.j_min..=self.j_max).flat_map(move |j| (self.i_min..=self.i_max).map(move |i| (i, j)))
    }
}

/// Scalar samples, one per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!("field has {} values, grid has {} nodes", values.len(), grid.len())));
        }
        if let Some(k) = values.iter().position(|x| !x.is_finite()) {
            let (i, j) = grid.node(k);
            return Err(Error::Domain {
                i,
                j,
                reason: "non-finite field value".into(),
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.node(k);
                f(grid.u(i), grid.v(j))
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        ScalarField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Apply `f` node-wise; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&x| f(x)).collect())
    }

    /// Combine two fields on the same grid node-wise.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Self::new(self.grid, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    /// Restriction to a window, on the corresponding sub-grid.
    pub fn restrict(&self, w: &Window) -> Result<Self> {
        let sub = self.grid.subgrid(w)?;
        let values = w.nodes().map(|(i, j)| self.at(i, j)).collect();
        Self::new(sub, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Samples at the nodes of [`Grid2D::coarsened`].
    pub fn coarsened(&self) -> Result<Self> {
        let c = self.grid.coarsened()?;
        let values = (0..c.len()).map(|k| c.node(k)).map(|(i, j)| self.at(2 * i, 2 * j)).collect();
        Self::new(c, values)
    }
}

/// Richardson extrapolation (4 f_h − f_2h)/3 on the coarse grid, for
/// quantities with an h² leading error term.
pub fn richardson(fine: &ScalarField, coarse: &ScalarField) -> Result<ScalarField> {
    let sampled = fine.coarsened()?;
    sampled.zip_map(coarse, |a, b| (4.0 * a - b) / 3.0)
}

/// Vector samples of fixed dimension, one per grid node (component-minor layout).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid2D,
    dim: usize,
    data: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Grid2D, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != grid.len() * dim {
            return Err(Error::Dimension(format!(
                "vector field data length {} does not match {} nodes x dim {dim}",
                data.len(),
                grid.len()
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            let (i, j) = grid.node(k / dim);
            return Err(Error::Domain {
                i,
                j,
                reason: "non-finite vector component".into(),
            });
        }
        Ok(VectorField { grid, dim, data })
    }

    pub fn from_fn(grid: Grid2D, dim: usize, f: impl Fn(f64, f64) -> Vec<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len() * dim);
        for k in 0..grid.len() {
            let (i, j) = grid.node(k);
            let x = f(grid.u(i), grid.v(j));
            if x.len() != dim {
                return Err(Error::Dimension(format!("expected {dim} components, got {}", x.len())));
            }
            data.extend_from_slice(&x);
        }
        Self::new(grid, dim, data)
    }

    pub fn from_nodes(grid: Grid2D, dim: usize, nodes: &[Vec<f64>]) -> Result<Self> {
        if nodes.iter().any(|x| x.len() != dim) {
            return Err(Error::Dimension(format!("all node vectors must have {dim} components")));
        }
        Self::new(grid, dim, nodes.iter().flatten().copied().collect())
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &[f64] {
        let k = self.grid.index(i, j) * self.dim;
        &self.data[k..k + self.dim]
    }

    /// Vector at flat node index `k = j * nu + i`.
    #[inline]
    pub fn at_index(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn component(&self, c: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.data.iter().skip(c).step_by(self.dim).copied().collect(),
        }
    }

    /// Node-wise Euclidean dot product with another field.
    pub fn dot(&self, other: &VectorField) -> Result<ScalarField> {
        same_grid(&self.grid, &other.grid)?;
        if self.dim != other.dim {
            return Err(Error::Dimension("dot product of fields with different dimensions".into()));
        }
        let values = self
            .nodes()
            .zip(other.nodes())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum())
            .collect();
        ScalarField::new(self.grid, values)
    }

    pub fn norms(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.nodes().map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt()).collect(),
        }
    }

    pub fn restrict(&self, w: &Window) -> Result<Self> {
        let sub = self.grid.subgrid(w)?;
        let mut data = Vec::with_capacity(sub.len() * self.dim);
        for (i, j) in w.nodes() {
            data.extend_from_slice(self.at(i, j));
        }
        Self::new(sub, self.dim, data)
    }

    /// Samples at the nodes of [`Grid2D::coarsened`].
    pub fn coarsened(&self) -> Result<Self> {
        let c = self.grid.coarsened()?;
        let mut data = Vec::with_capacity(c.len() * self.dim);
        for k in 0..c.len() {
            let (i, j) = c.node(k);
            data.extend_from_slice(self.at(2 * i, 2 * j));
        }
        Self::new(c, self.dim, data)
    }
}

/// Field whose boundary (or otherwise unreliable) nodes are excluded from norms.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField {
    pub field: ScalarField,
    pub valid: Vec<bool>,
}

impl MaskedField {
    /// Mask that keeps the interior nodes of the grid.
    pub fn interior(field: ScalarField) -> Self {
        let g = *field.grid();
        let valid = (0..g.len())
            .map(|k| {
                let (i, j) = g.node(k);
                g.is_interior(i, j)
            })
            .collect();
        MaskedField { field, valid }
    }

    /// Mask that keeps nodes at least `m` steps from the boundary.
    pub fn with_margin(field: ScalarField, m: usize) -> Self {
        let g = *field.grid();
        let valid = (0..g.len())
            .map(|k| {
                let (i, j) = g.node(k);
                i >= m && j >= m && i + m < g.nu() && j + m < g.nv()
            })
            .collect();
        MaskedField { field, valid }
    }

    pub fn grid(&self) -> &Grid2D {
        self.field.grid()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.field.at(i, j)
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[self.field.grid().index(i, j)]
    }

    fn valid_values(&self, window: Option<&Window>) -> impl Iterator<Item = f64> + '_ {
        let g = *self.field.grid();
        let window = window.copied();
        self.field
            .values()
            .iter()
            .enumerate()
            .filter(move |(k, _)| {
                let (i, j) = g.node(*k);
                self.valid[*k] && window.is_none_or(|w| w.contains(i, j))
            })
            .map(|(_, &x)| x)
    }

    /// Largest absolute value over valid nodes (0 if none).
    pub fn max_abs(&self) -> f64 {
        self.valid_values(None).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean_abs(&self) -> f64 {
        mean_abs(self.valid_values(None))
    }

    pub fn max_abs_in(&self, w: &Window) -> f64 {
        self.valid_values(Some(w)).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean_abs_in(&self, w: &Window) -> f64 {
        mean_abs(self.valid_values(Some(w)))
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }
}

fn mean_abs(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x.abs(), n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

pub(crate) fn same_grid(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a != b {
        return Err(Error::Dimension("fields live on different grids".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    U,
    V,
}

/// Apply a 1-D line operator along every grid line of a strided field.
fn along_lines(grid: &Grid2D, dim: usize, data: &[f64], axis: Axis, op: impl Fn(&[f64], &mut [f64])) -> Vec<f64> {
    let (n_line, n_lines) = match axis {
        Axis::U => (grid.nu(), grid.nv()),
        Axis::V => (grid.nv(), grid.nu()),
    };
    let mut out = vec![0.0; data.len()];
    let mut line = vec![0.0; n_line];
    let mut res = vec![0.0; n_line];
    for l in 0..n_lines {
        for c in 0..dim {
            for (k, x) in line.iter_mut().enumerate() {
                let (i, j) = if axis == Axis::U { (k, l) } else { (l, k) };
                *x = data[grid.index(i, j) * dim + c];
            }
            op(&line, &mut res);
            for (k, &x) in res.iter().enumerate() {
                let (i, j) = if axis == Axis::U { (k, l) } else { (l, k) };
                out[grid.index(i, j) * dim + c] = x;
            }
        }
    }
    out
}

/// Second-order first derivative of uniformly spaced samples.
///
/// With four or more samples the boundary closure carries the same leading
/// error (h²/6) y''' as the central formula, so the error field stays smooth
/// and differences of differences remain second order up to the boundary.
pub(crate) fn diff1(y: &[f64], h: f64, out: &mut [f64]) {
    let n = y.len();
    for k in 1..n - 1 {
        out[k] = (y[k + 1] - y[k - 1]) / (2.0 * h);
    }
    if n >= 4 {
        out[0] = (-2.0 * y[0] + 3.5 * y[1] - 2.0 * y[2] + 0.5 * y[3]) / h;
        out[n - 1] = (2.0 * y[n - 1] - 3.5 * y[n - 2] + 2.0 * y[n - 3] - 0.5 * y[n - 4]) / h;
    } else {
        out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
        out[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    }
}

/// Second-order second derivative; the boundary closure needs four samples.
pub(crate) fn diff2(y: &[f64], h: f64, out: &mut [f64]) {
    let n = y.len();
    let h2 = h * h;
    for k in 1..n - 1 {
        out[k] = (y[k + 1] - 2.0 * y[k] + y[k - 1]) / h2;
    }
    if n >= 4 {
        out[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
        out[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
}

fn check_axis(grid: &Grid2D, axis: Axis) -> Result<()> {
    let n = if axis == Axis::U { grid.nu() } else { grid.nv() };
    if n < 3 {
        return Err(Error::Dimension(format!("need at least 3 nodes along the axis, got {n}")));
    }
    Ok(())
}

fn d_raw(grid: &Grid2D, dim: usize, data: &[f64], axis: Axis, order: u8) -> Result<Vec<f64>> {
    check_axis(grid, axis)?;
    let h = if axis == Axis::U { grid.hu() } else { grid.hv() };
    Ok(along_lines(
        grid,
        dim,
        data,
        axis,
        |y, out| {
            if order == 1 {
                diff1(y, h, out)
            } else {
                diff2(y, h, out)
            }
        },
    ))
}

pub fn partial_u(f: &ScalarField) -> Result<ScalarField> {
    ScalarField::new(f.grid, d_raw(&f.grid, 1, &f.values, Axis::U, 1)?)
}

pub fn partial_v(f: &ScalarField) -> Result<ScalarField> {
    ScalarField::new(f.grid, d_raw(&f.grid, 1, &f.values, Axis::V, 1)?)
}

pub fn partial_uu(f: &ScalarField) -> Result<ScalarField> {
    ScalarField::new(f.grid, d_raw(&f.grid, 1, &f.values, Axis::U, 2)?)
}

pub fn partial_vv(f: &ScalarField) -> Result<ScalarField> {
    ScalarField::new(f.grid, d_raw(&f.grid, 1, &f.values, Axis::V, 2)?)
}

pub fn partial_uv(f: &ScalarField) -> Result<ScalarField> {
    partial_u(&partial_v(f)?)
}

/// Five-point Laplacian; boundary nodes are masked out.
pub fn laplacian(f: &ScalarField) -> Result<MaskedField> {
    let g = f.grid;
    check_axis(&g, Axis::U)?;
    check_axis(&g, Axis::V)?;
    let (hu2, hv2) = (g.hu() * g.hu(), g.hv() * g.hv());
    let mut out = vec![0.0; g.len()];
    for j in 1..g.nv() - 1 {
        for i in 1..g.nu() - 1 {
            let c = f.at(i, j);
            out[g.index(i, j)] = (f.at(i + 1, j) - 2.0 * c + f.at(i - 1, j)) / hu2 + (f.at(i, j + 1) - 2.0 * c + f.at(i, j - 1)) / hv2;
        }
    }
    Ok(MaskedField::interior(ScalarField::new(g, out)?))
}

impl VectorField {
    pub fn partial_u(&self) -> Result<VectorField> {
        VectorField::new(self.grid, self.dim, d_raw(&self.grid, self.dim, &self.data, Axis::U, 1)?)
    }

    pub fn partial_v(&self) -> Result<VectorField> {
        VectorField::new(self.grid, self.dim, d_raw(&self.grid, self.dim, &self.data, Axis::V, 1)?)
    }

    pub fn partial_uu(&self) -> Result<VectorField> {
        VectorField::new(self.grid, self.dim, d_raw(&self.grid, self.dim, &self.data, Axis::U, 2)?)
    }

    pub fn partial_vv(&self) -> Result<VectorField> {
        VectorField::new(self.grid, self.dim, d_raw(&self.grid, self.dim, &self.data, Axis::V, 2)?)
    }

    pub fn partial_uv(&self) -> Result<VectorField> {
        self.partial_v()?.partial_u()
    }
}

/// Cumulative trapezoid antiderivative along row `v_index`, zero at `u0_index`.
pub fn integrate_along_u(field: &ScalarField, v_index: usize, u0_index: usize) -> Result<Vec<f64>> {
    let g = field.grid;
    if v_index >= g.nv() || u0_index >= g.nu() {
        return Err(Error::InvalidParameter(format!(
            "indices (u0 {u0_index}, v {v_index}) outside {}x{} grid",
            g.nu(),
            g.nv()
        )));
    }
    let line: Vec<f64> = (0..g.nu()).map(|i| field.at(i, v_index)).collect();
    Ok(cumulative_trapezoid(&line, g.hu(), u0_index))
}

/// Cumulative trapezoid antiderivative along column `u_index`, zero at `v0_index`.
pub fn integrate_along_v(field: &ScalarField, u_index: usize, v0_index: usize) -> Result<Vec<f64>> {
    let g = field.grid;
    if u_index >= g.nu() || v0_index >= g.nv() {
        return Err(Error::InvalidParameter(format!(
            "indices (u {u_index}, v0 {v0_index}) outside {}x{} grid",
            g.nu(),
            g.nv()
        )));
    }
    let line: Vec<f64> = (0..g.nv()).map(|j| field.at(u_index, j)).collect();
    Ok(cumulative_trapezoid(&line, g.hv(), v0_index))
}

fn cumulative_trapezoid(y: &[f64], h: f64, origin: usize) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    for k in origin + 1..y.len() {
        out[k] = out[k - 1] + 0.5 * h * (y[k] + y[k - 1]);
    }
    for k in (0..origin).rev() {
        out[k] = out[k + 1] - 0.5 * h * (y[k] + y[k + 1]);
    }
    out
}
