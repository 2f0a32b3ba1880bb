//! The sinh-Poisson equation `Δ ln ν = 2 (1 - ν²) / ν`, equivalently
//! `Δf + 4 sinh f = 0` for `f = ln ν`: residuals, a damped Newton solver with
//! Dirichlet data, and strong-regularity certification.

use serde::{Deserialize, Serialize};

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::grid::{laplacian, partial_u, partial_v, same_grid, Grid2D, MaskedField, ScalarField, Window};

/// Positive normal-curvature function ν together with its strong-regularity margin.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalCurvatureField {
    nu: ScalarField,
    margin: f64,
}

impl NormalCurvatureField {
    pub fn new(nu: ScalarField) -> Result<Self> {
        let g = *nu.grid();
        if let Some(k) = nu.values().iter().position(|&x| x <= 0.0) {
            let (i, j) = g.node(k);
            return Err(Error::Domain {
                i,
                j,
                reason: format!("normal curvature must be positive, got {}", nu.values()[k]),
            });
        }
        let margin = regularity_margin(&nu, &g.full_window())?;
        Ok(NormalCurvatureField { nu, margin })
    }

    /// ν = exp(f).
    pub fn from_log(f: &ScalarField) -> Result<Self> {
        Self::new(f.map(f64::exp)?)
    }

    pub fn field(&self) -> &ScalarField {
        &self.nu
    }

    pub fn grid(&self) -> &Grid2D {
        self.nu.grid()
    }

    pub fn log(&self) -> ScalarField {
        self.nu.map(f64::ln).expect("ln of a positive finite field is finite")
    }

    /// min |ν_u ν_v| over the interior of the whole grid.
    pub fn strong_regularity_margin(&self) -> f64 {
        self.margin
    }

    pub fn restrict(&self, w: &Window) -> Result<Self> {
        Self::new(self.nu.restrict(w)?)
    }
}

fn regularity_margin(nu: &ScalarField, w: &Window) -> Result<f64> {
    let nu_u = partial_u(nu)?;
    let nu_v = partial_v(nu)?;
    let mut margin = f64::INFINITY;
    for (i, j) in w.nodes() {
        if w.contains_interior(i, j) {
            margin = margin.min((nu_u.at(i, j) * nu_v.at(i, j)).abs());
        }
    }
    Ok(if margin.is_finite() { margin } else { 0.0 })
}

/// `Δ(ln ν) - 2 (1 - ν²)/ν` on interior nodes.
pub fn residual(nu: &NormalCurvatureField) -> Result<MaskedField> {
    let lap = laplacian(&nu.log())?;
    let values = lap
        .field
        .values()
        .iter()
        .zip(nu.field().values())
        .map(|(&l, &n)| l - 2.0 * (1.0 - n * n) / n)
        .collect();
    Ok(MaskedField {
        field: ScalarField::new(*nu.grid(), values)?,
        valid: lap.valid,
    })
}

/// `Δf + 4 sinh f` on interior nodes.
pub fn residual_f_form(f: &ScalarField) -> Result<MaskedField> {
    let lap = laplacian(f)?;
    let values = lap.field.values().iter().zip(f.values()).map(|(&l, &x)| l + 4.0 * x.sinh()).collect();
    Ok(MaskedField {
        field: ScalarField::new(*f.grid(), values)?,
        valid: lap.valid,
    })
}

/// min |ν_u ν_v| over the interior of a window; positive means certified.
pub fn certify_strong_regularity(nu: &NormalCurvatureField, window: &Window) -> Result<f64> {
    Window::new(nu.grid(), window.i_min, window.i_max, window.j_min, window.j_max)?;
    regularity_margin(nu.field(), window)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub min_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iters: 30,
            armijo: 1e-4,
            min_step: 2f64.powi(-20),
        }
    }
}

/// One row of the residual history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual_inf: f64,
    pub residual_l2: f64,
    /// Newton step length that produced this iterate (0 for the initial guess).
    pub step_size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Converged iterate, or the best one seen when not converged.
    pub f: ScalarField,
    pub iterations: usize,
    pub residual_inf: f64,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
}

impl SolveReport {
    pub fn nu(&self) -> Result<NormalCurvatureField> {
        NormalCurvatureField::from_log(&self.f)
    }

    /// Residual history as CSV with header `iter,residual_inf,step_size`.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("iter,residual_inf,step_size\n");
        for r in &self.history {
            s.push_str(&format!("{},{:e},{:e}\n", r.iter, r.residual_inf, r.step_size));
        }
        s
    }

    /// Estimate C in r_{k+1} <= C r_k^2 from the last three iterates.
    pub fn quadratic_constant(&self) -> Option<f64> {
        let n = self.history.len();
        if n < 3 {
            return None;
        }
        self.history[n - 3..]
            .windows(2)
            .filter(|w| w[0].residual_inf > 0.0)
            .map(|w| w[1].residual_inf / (w[0].residual_inf * w[0].residual_inf))
            .reduce(f64::max)
    }
}

fn interior_residual(f: &ScalarField) -> Result<(Vec<f64>, f64, f64)> {
    let g = f.grid();
    let r = residual_f_form(f)?;
    let mut out = Vec::with_capacity((g.nu() - 2) * (g.nv() - 2));
    for j in 1..g.nv() - 1 {
        for i in 1..g.nu() - 1 {
            out.push(r.at(i, j));
        }
    }
    let inf = out.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let l2 = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((out, inf, l2))
}

/// Damped Newton iteration for `Δf + 4 sinh f = 0` with Dirichlet data.
///
/// Only the boundary values of `boundary` are used; all nodes of
/// `initial_guess` seed the iteration with the boundary overwritten.
pub fn solve(boundary: &ScalarField, initial_guess: &ScalarField, opts: &SolveOptions) -> Result<SolveReport> {
    same_grid(boundary.grid(), initial_guess.grid())?;
    if !(opts.tol > 0.0) || !(opts.min_step > 0.0) {
        return Err(Error::InvalidParameter("tolerance and minimum step must be positive".into()));
    }
    let g = *boundary.grid();
    let (nu, nv) = (g.nu(), g.nv());
    let m = nu - 2;
    let n_unknown = m * (nv - 2);
    let mut vals = initial_guess.values().to_vec();
    for (k, x) in vals.iter_mut().enumerate() {
        let (i, j) = g.node(k);
        if !g.is_interior(i, j) {
            *x = boundary.values()[k];
        }
    }
    let mut f = ScalarField::new(g, vals)?;
    let (mut res, mut r_inf, mut r_l2) = interior_residual(&f)?;
    let mut history = vec![IterationRecord {
        iter: 0,
        residual_inf: r_inf,
        residual_l2: r_l2,
        step_size: 0.0,
    }];
    let mut best = (f.clone(), r_inf);
    let (cu, cv) = (1.0 / (g.hu() * g.hu()), 1.0 / (g.hv() * g.hv()));
    let unknown = |i: usize, j: usize| (j - 1) * m + (i - 1);
    let mut iter = 0;
    while r_inf >= opts.tol {
        if iter == opts.max_iters {
            return Err(Error::NotConverged(Box::new(SolveReport {
                f: best.0,
                iterations: iter,
                residual_inf: best.1,
                converged: false,
                history,
            })));
        }
        iter += 1;
        let mut jac = BandedMatrix::zeros(n_unknown, m, m);
        for j in 1..nv - 1 {
            for i in 1..nu - 1 {
                let r = unknown(i, j);
                jac.set(r, r, -2.0 * (cu + cv) + 4.0 * f.at(i, j).cosh());
                if i > 1 {
                    jac.set(r, unknown(i - 1, j), cu);
                }
                if i + 2 < nu {
                    jac.set(r, unknown(i + 1, j), cu);
                }
                if j > 1 {
                    jac.set(r, unknown(i, j - 1), cv);
                }
                if j + 2 < nv {
                    jac.set(r, unknown(i, j + 1), cv);
                }
            }
        }
        let lu = jac.factor()?;
        let mut delta: Vec<f64> = res.iter().map(|x| -x).collect();
        lu.solve_in_place(&mut delta);

        let mut step = 1.0;
        let (trial, t_res, t_inf, t_l2) = loop {
            let mut v = f.values().to_vec();
            for j in 1..nv - 1 {
                for i in 1..nu - 1 {
                    v[g.index(i, j)] += step * delta[unknown(i, j)];
                }
            }
            let cand = ScalarField::new(g, v);
            if let Ok(cand) = cand {
                let (cr, ci, cl) = interior_residual(&cand)?;
                if cl <= (1.0 - opts.armijo * step) * r_l2 || step <= opts.min_step {
                    break (cand, cr, ci, cl);
                }
            } else if step <= opts.min_step {
                return Err(Error::LinearAlgebra("Newton update overflowed at the minimum step".into()));
            }
            step *= 0.5;
        };
        f = trial;
        res = t_res;
        r_inf = t_inf;
        r_l2 = t_l2;
        history.push(IterationRecord {
            iter,
            residual_inf: r_inf,
            residual_l2: r_l2,
            step_size: step,
        });
        if r_inf < best.1 {
            best = (f.clone(), r_inf);
        }
    }
    Ok(SolveReport {
        f,
        iterations: iter,
        residual_inf: r_inf,
        converged: true,
        history,
    })
}

/// Boundary traces of an analytic function, zero inside.
pub fn dirichlet_from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
    ScalarField::from_fn(grid, |u, v| {
        let on_edge = |x: f64, lo: f64, hi: f64| (x - lo).abs() < 1e-12 || (x - hi).abs() < 1e-12;
        if on_edge(u, grid.u_min(), grid.u_max()) || on_edge(v, grid.v_min(), grid.v_max()) {
            f(u, v)
        } else {
            0.0
        }
    })
}
