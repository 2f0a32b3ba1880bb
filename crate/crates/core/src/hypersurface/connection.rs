use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::spectrum::{shape_spectrum, Classification, ShapeSpectrum, SpectrumOptions};
use super::HypersurfaceMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionOptions {
    pub spectrum: SpectrumOptions,
    /// Parameter step of the five-point stencil for directional derivatives.
    pub step: f64,
    /// Minimal separation |κ₁ − κ₂| (and |κ| from zero) required for distinct eigen-directions.
    pub gap: f64,
}

impl Default for ConnectionOptions {
    fn default() -> Self {
        ConnectionOptions {
            spectrum: SpectrumOptions::default(),
            step: 5e-3,
            gap: 1e-4,
        }
    }
}

/// Connection scalars of the frame (X, Y, e_i) at a point:
/// γ₁ = g(∇_X X, Y), γ₂ = g(∇_Y X, Y), λ_i = g(∇_X X, e_i), μ_i = g(∇_Y Y, e_i),
/// σ_i = g(∇_{e_i} X, Y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionScalars {
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    /// e_i(κ₁)/κ₁ and e_i(κ₂)/κ₂, which equal λ_i and μ_i on a type-number-two hypersurface.
    pub log_derivative_1: Vec<f64>,
    pub log_derivative_2: Vec<f64>,
    /// Eigenvalues (κ₁, κ₂) of X and Y at the point.
    pub kappa: (f64, f64),
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
struct LocalFrame {
    x: DVector<f64>,
    y: DVector<f64>,
    e: Vec<DVector<f64>>,
    kappa: (f64, f64),
}

fn normalize(v: DVector<f64>) -> DVector<f64> {
    let r = v.norm();
    v / r
}

fn project(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for b in basis {
        out.axpy(v.dot(b), b, 1.0);
    }
    out
}

fn gram_schmidt(vs: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for b in &out {
            let c = v.dot(b);
            v.axpy(-c, b, 1.0);
        }
        out.push(normalize(v));
    }
    out
}

/// Frame at a spectrum, aligned to `reference` (signs and null-space basis).
fn local_frame(s: &ShapeSpectrum, degenerate: bool, reference: Option<&LocalFrame>, gap: f64) -> Result<LocalFrame> {
    if s.eigenvalues.len() < 3 {
        return Err(Error::Dimension("connection scalars need n >= 3".into()));
    }
    let (a, b) = s.principal_pair();
    let (k1, k2) = (s.eigenvalues[a], s.eigenvalues[b]);
    let null = s.null_indices();
    let null_max = s.max_null();
    if !(k1.abs().min(k2.abs()) > gap + null_max) {
        return Err(Error::Instability(format!(
            "nonzero eigenvalues ({k1:.3e}, {k2:.3e}) approach the null eigenvalues ({null_max:.3e})"
        )));
    }
    let (x, y) = if degenerate {
        if (k1 - k2).abs() > s.tau {
            return Err(Error::Instability(format!(
                "bi-umbilical point splits nearby: |k1 - k2| = {:.3e}",
                (k1 - k2).abs()
            )));
        }
        let delta = [s.eigenvectors[a].clone(), s.eigenvectors[b].clone()];
        let j = &s.derivatives.jacobian;
        let x = normalize(project(&j.column(0).into_owned(), &delta));
        let mut y = project(&j.column(1).into_owned(), &delta);
        let c = y.dot(&x);
        y.axpy(-c, &x, 1.0);
        (x, normalize(y))
    } else {
        if !((k1 - k2).abs() > gap) {
            return Err(Error::Instability(format!("eigenvalue crossing: |k1 - k2| = {:.3e}", (k1 - k2).abs())));
        }
        (s.eigenvectors[a].clone(), s.eigenvectors[b].clone())
    };
    let zero: Vec<DVector<f64>> = null.iter().map(|&k| s.eigenvectors[k].clone()).collect();
    let (x, y, e) = match reference {
        None => {
            let j = &s.derivatives.jacobian;
            let seeds = (0..zero.len())
                .map(|i| project(&j.column((2 + i).min(j.ncols() - 1)).into_owned(), &zero))
                .collect();
            (x, y, gram_schmidt(seeds))
        }
        Some(r) => {
            let x = if x.dot(&r.x) < 0.0 { -x } else { x };
            let y = if y.dot(&r.y) < 0.0 { -y } else { y };
            let e = gram_schmidt(r.e.iter().map(|v| project(v, &zero)).collect());
            (x, y, e)
        }
    };
    Ok(LocalFrame { x, y, e, kappa: (k1, k2) })
}

/// Connection scalars at `p` from eigen-direction fields differentiated
/// along parameter lines with a five-point stencil.
pub fn connection_scalars(map: &dyn HypersurfaceMap, p: &[f64], opts: &ConnectionOptions) -> Result<ConnectionScalars> {
    let s0 = shape_spectrum(map, p, &opts.spectrum)?;
    let degenerate = match s0.classification {
        Classification::TypeTwo => false,
        Classification::BiUmbilical => true,
        c => {
            return Err(Error::Instability(format!(
                "connection scalars need a type-number-two point, found {}",
                c.as_str()
            )))
        }
    };
    let f0 = local_frame(&s0, degenerate, None, opts.gap)?;
    let j = &s0.derivatives.jacobian;
    let metric = j.transpose() * j;
    let ginv = metric.try_inverse().ok_or_else(|| Error::LinearAlgebra("singular metric".into()))?;
    let h = opts.step;
    // derivative of the frame fields along ambient direction v
    let along = |v: &DVector<f64>| -> Result<(LocalFrame, [f64; 2])> {
        let c = &ginv * (j.transpose() * v);
        let frame_at = |t: f64| -> Result<LocalFrame> {
            let q: Vec<f64> = p.iter().zip(c.iter()).map(|(a, b)| a + t * b).collect();
            let s = shape_spectrum(map, &q, &opts.spectrum)?;
            local_frame(&s, degenerate, Some(&f0), opts.gap)
        };
        let fr = [frame_at(2.0 * h)?, frame_at(h)?, frame_at(-h)?, frame_at(-2.0 * h)?];
        let d = |g: &dyn Fn(&LocalFrame) -> DVector<f64>| (g(&fr[3]) - g(&fr[0]) + (g(&fr[1]) - g(&fr[2])) * 8.0) / (12.0 * h);
        let ds = |g: &dyn Fn(&LocalFrame) -> f64| (g(&fr[3]) - g(&fr[0]) + 8.0 * (g(&fr[1]) - g(&fr[2]))) / (12.0 * h);
        let dk1 = ds(&|f| f.kappa.0.abs().ln());
        let dk2 = ds(&|f| f.kappa.1.abs().ln());
        let dx = d(&|f| f.x.clone());
        let dy = d(&|f| f.y.clone());
        Ok((
            LocalFrame {
                x: dx,
                y: dy,
                e: Vec::new(),
                kappa: (0.0, 0.0),
            },
            [dk1, dk2],
        ))
    };
    let (dx_x, _) = along(&f0.x)?;
    let (dy_y, _) = along(&f0.y)?;
    let mut lambda = Vec::new();
    let mut mu = Vec::new();
    let mut sigma = Vec::new();
    let mut ld1 = Vec::new();
    let mut ld2 = Vec::new();
    for e in &f0.e {
        lambda.push(dx_x.x.dot(e));
        mu.push(dy_y.y.dot(e));
        let (de, dk) = along(e)?;
        sigma.push(de.x.dot(&f0.y));
        ld1.push(dk[0]);
        ld2.push(dk[1]);
    }
    Ok(ConnectionScalars {
        gamma1: dx_x.x.dot(&f0.y),
        gamma2: -dy_y.y.dot(&f0.x),
        lambda,
        mu,
        sigma,
        log_derivative_1: ld1,
        log_derivative_2: ld2,
        kappa: f0.kappa,
        degenerate,
    })
}
