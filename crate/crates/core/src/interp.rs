//! C² tensor-product cubic spline interpolation on uniform grids.
//!
//! Node slopes come from clamped cubic splines whose end slopes are fourth-order
//! one-sided differences; the interpolant is evaluated as a bicubic Hermite
//! patch from `(f, f_u, f_v, f_uv)`, which reproduces the tensor spline exactly.

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField, VectorField};

/// Spline slopes for uniformly spaced samples.
pub fn spline_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    match n {
        0 => return vec![],
        1 => return vec![0.0],
        2 => {
            let s = (y[1] - y[0]) / h;
            return vec![s, s];
        }
        3 | 4 => {
            let mut out = vec![0.0; n];
            crate::grid::diff1(y, h, &mut out);
            return out;
        }
        _ => {}
    }
    let m0 = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
    let mn = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]) / (12.0 * h);
    // interior rows: m[k-1] + 4 m[k] + m[k+1] = 3 (y[k+1] - y[k-1]) / h
    let k_n = n - 2;
    let mut diag = vec![4.0; k_n];
    let mut rhs: Vec<f64> = (1..n - 1).map(|k| 3.0 * (y[k + 1] - y[k - 1]) / h).collect();
    rhs[0] -= m0;
    rhs[k_n - 1] -= mn;
    // Thomas algorithm with unit off-diagonals.
    for k in 1..k_n {
        let w = 1.0 / diag[k - 1];
        diag[k] -= w;
        rhs[k] -= w * rhs[k - 1];
    }
    let mut m = vec![0.0; n];
    m[0] = m0;
    m[n - 1] = mn;
    m[k_n] = rhs[k_n - 1] / diag[k_n - 1];
    for k in (1..k_n).rev() {
        m[k] = (rhs[k - 1] - m[k + 1]) / diag[k - 1];
    }
    m
}

#[inline]
fn hermite(s: f64) -> ([f64; 2], [f64; 2], [f64; 2], [f64; 2]) {
    let s2 = s * s;
    let s3 = s2 * s;
    // values and first derivatives of h00, h01 (value basis) and h10, h11 (slope basis)
    let v0 = [2.0 * s3 - 3.0 * s2 + 1.0, -2.0 * s3 + 3.0 * s2];
    let v1 = [s3 - 2.0 * s2 + s, s3 - s2];
    let d0 = [6.0 * s2 - 6.0 * s, -6.0 * s2 + 6.0 * s];
    let d1 = [3.0 * s2 - 4.0 * s + 1.0, 3.0 * s2 - 2.0 * s];
    (v0, v1, d0, d1)
}

/// Value and first partial derivatives of an interpolant at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSample {
    pub value: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
}

/// Bicubic spline through every component of a vector field.
#[derive(Debug, Clone)]
pub struct BicubicSpline {
    grid: Grid2D,
    dim: usize,
    f: Vec<f64>,
    fu: Vec<f64>,
    fv: Vec<f64>,
    fuv: Vec<f64>,
}

impl BicubicSpline {
    pub fn from_scalar(field: &ScalarField) -> Self {
        let vf = VectorField::new(*field.grid(), 1, field.values().to_vec()).expect("scalar field is a valid 1-d vector field");
        Self::from_vector(&vf)
    }

    pub fn from_vector(field: &VectorField) -> Self {
        let g = *field.grid();
        let dim = field.dim();
        let f = field.data().to_vec();
        let fu = slopes_along(&g, dim, &f, true);
        let fv = slopes_along(&g, dim, &f, false);
        let fuv = slopes_along(&g, dim, &fu, false);
        BicubicSpline { grid: g, dim, f, fu, fv, fuv }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate at `(u, v)`; points up to `1e-9` outside the grid are clamped
    /// onto the boundary cells.
    pub fn sample(&self, u: f64, v: f64) -> Result<SplineSample> {
        let g = &self.grid;
        if !g.contains(u, v, 1e-9 * (1.0 + g.h_max())) {
            return Err(Error::InvalidParameter(format!(
                "interpolation point ({u}, {v}) outside [{}, {}] x [{}, {}]",
                g.u_min(),
                g.u_max(),
                g.v_min(),
                g.v_max()
            )));
        }
        let locate = |x: f64, lo: f64, h: f64, n: usize| {
            let t = ((x - lo) / h).clamp(0.0, (n - 1) as f64);
            let c = (t.floor() as usize).min(n - 2);
            (c, t - c as f64)
        };
        let (ci, s) = locate(u, g.u_min(), g.hu(), g.nu());
        let (cj, t) = locate(v, g.v_min(), g.hv(), g.nv());
        let (su0, su1, sd0, sd1) = hermite(s);
        let (tv0, tv1, td0, td1) = hermite(t);
        let (hu, hv) = (g.hu(), g.hv());
        let mut value = vec![0.0; self.dim];
        let mut du = vec![0.0; self.dim];
        let mut dv = vec![0.0; self.dim];
        for p in 0..2 {
            for q in 0..2 {
                let k = g.index(ci + p, cj + q) * self.dim;
                for c in 0..self.dim {
                    let (f, fu, fv, fuv) = (self.f[k + c], self.fu[k + c] * hu, self.fv[k + c] * hv, self.fuv[k + c] * hu * hv);
                    value[c] += su0[p] * tv0[q] * f + su1[p] * tv0[q] * fu + su0[p] * tv1[q] * fv + su1[p] * tv1[q] * fuv;
                    du[c] += sd0[p] * tv0[q] * f + sd1[p] * tv0[q] * fu + sd0[p] * tv1[q] * fv + sd1[p] * tv1[q] * fuv;
                    dv[c] += su0[p] * td0[q] * f + su1[p] * td0[q] * fu + su0[p] * td1[q] * fv + su1[p] * td1[q] * fuv;
                }
            }
        }
        for c in 0..self.dim {
            du[c] /= hu;
            dv[c] /= hv;
        }
        Ok(SplineSample { value, du, dv })
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<Vec<f64>> {
        Ok(self.sample(u, v)?.value)
    }

    pub fn eval_scalar(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.sample(u, v)?.value[0])
    }
}

fn slopes_along(g: &Grid2D, dim: usize, data: &[f64], along_u: bool) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    let (n_line, n_lines, h) = if along_u { (g.nu(), g.nv(), g.hu()) } else { (g.nv(), g.nu(), g.hv()) };
    let mut line = vec![0.0; n_line];
    for l in 0..n_lines {
        for c in 0..dim {
            let idx = |k: usize| {
                let (i, j) = if along_u { (k, l) } else { (l, k) };
                g.index(i, j) * dim + c
            };
            for (k, x) in line.iter_mut().enumerate() {
                *x = data[idx(k)];
            }
            for (k, m) in spline_slopes(&line, h).into_iter().enumerate() {
                out[idx(k)] = m;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_exact_for_cubics() {
        let h = 0.1;
        let y: Vec<f64> = (0..12)
            .map(|k| {
                let x = k as f64 * h;
                x * x * x - 2.0 * x + 1.0
            })
            .collect();
        let m = spline_slopes(&y, h);
        for (k, mk) in m.iter().enumerate() {
            let x = k as f64 * h;
            assert!((mk - (3.0 * x * x - 2.0)).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn interpolates_nodes_exactly_and_smooth_functions_accurately() {
        let g = Grid2D::new(-1.0, 1.0, 21, 0.0, 2.0, 17).unwrap();
        let f = |u: f64, v: f64| (1.3 * u).sin() * (0.7 * v).cos() + u * v;
        let field = ScalarField::from_fn(g, f).unwrap();
        let s = BicubicSpline::from_scalar(&field);
        for (i, j) in [(0, 0), (5, 7), (20, 16), (13, 2)] {
            let (u, v) = g.coords(i, j);
            assert!((s.eval_scalar(u, v).unwrap() - field.at(i, j)).abs() < 1e-14);
        }
        let mut err: f64 = 0.0;
        let mut derr: f64 = 0.0;
        for a in 0..37 {
            for b in 0..29 {
                let u = -1.0 + 2.0 * a as f64 / 36.0;
                let v = 2.0 * b as f64 / 28.0;
                let smp = s.sample(u, v).unwrap();
                err = err.max((smp.value[0] - f(u, v)).abs());
                let fu = 1.3 * (1.3 * u).cos() * (0.7 * v).cos() + v;
                derr = derr.max((smp.du[0] - fu).abs());
            }
        }
        // h = 0.1 / 0.125: fourth-order value error, third-order derivative error
        assert!(err < 2e-5, "value error {err}");
        assert!(derr < 5e-4, "derivative error {derr}");
        assert!(s.sample(1.5, 0.0).is_err());
    }

    #[test]
    fn reproduces_bicubic_polynomials() {
        let g = Grid2D::square(0.0, 1.0, 9).unwrap();
        let p = |u: f64, v: f64| u * u * u * v - 2.0 * u * v * v * v + u * u * v * v + 3.0;
        let s = BicubicSpline::from_scalar(&ScalarField::from_fn(g, p).unwrap());
        for (u, v) in [(0.13, 0.77), (0.5, 0.5), (0.99, 0.01), (0.31, 0.62)] {
            assert!((s.eval_scalar(u, v).unwrap() - p(u, v)).abs() < 1e-12);
        }
    }
}
