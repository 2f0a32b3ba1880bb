use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{HypersurfaceMap, SurfaceChart};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Eigenvalues with |κ| ≤ tau count as zero.
    pub tau: f64,
    /// Finite-difference step in parameter units.
    pub step: f64,
    /// Smallest admissible ratio of extreme singular values of the Jacobian.
    pub rank_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            tau: 1e-5,
            step: 1e-3,
            rank_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    TypeTwo,
    BiUmbilical,
    TypeOne,
    Flat,
    Other,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::TypeTwo => "type_two",
            Classification::BiUmbilical => "bi_umbilical",
            Classification::TypeOne => "type_one",
            Classification::Flat => "flat",
            Classification::Other => "other",
        }
    }
}

/// Position, Jacobian and Hessian of a map at a parameter point.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub x: DVector<f64>,
    /// (n+1) × n, column a = ∂X/∂p_a.
    pub jacobian: DMatrix<f64>,
    /// hessian[a][b] = ∂²X/∂p_a∂p_b.
    pub hessian: Vec<Vec<DVector<f64>>>,
}

/// Fourth-order central differences; mixed second derivatives use Richardson
/// extrapolation of the four-point cross stencil.
pub fn derivatives(map: &dyn HypersurfaceMap, p: &[f64], step: f64) -> Derivatives {
    derivatives_of(p.len(), |q| map.eval(q), p, step)
}

/// Same as [`derivatives`] for a two-parameter chart.
pub fn chart_derivatives(chart: &dyn SurfaceChart, u: f64, v: f64, step: f64) -> Derivatives {
    derivatives_of(2, |q| chart.eval(q[0], q[1]), &[u, v], step)
}

fn derivatives_of(n: usize, f: impl Fn(&[f64]) -> DVector<f64>, p: &[f64], d: f64) -> Derivatives {
    let at = |offsets: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(a, s) in offsets {
            q[a] += s;
        }
        f(&q)
    };
    let x = f(p);
    let m = x.len();
    let mut jacobian = DMatrix::zeros(m, n);
    let mut hessian = vec![vec![DVector::zeros(m); n]; n];
    for a in 0..n {
        let (p1, m1) = (at(&[(a, d)]), at(&[(a, -d)]));
        let (p2, m2) = (at(&[(a, 2.0 * d)]), at(&[(a, -2.0 * d)]));
        jacobian.set_column(a, &((&m2 - &p2 + (&p1 - &m1) * 8.0) / (12.0 * d)));
        hessian[a][a] = (-(&p2 + &m2) + (&p1 + &m1) * 16.0 - &x * 30.0) / (12.0 * d * d);
    }
    for a in 0..n {
        for b in a + 1..n {
            let cross = |s: f64| (at(&[(a, s), (b, s)]) - at(&[(a, s), (b, -s)]) - at(&[(a, -s), (b, s)]) + at(&[(a, -s), (b, -s)])) / (4.0 * s * s);
            let h = (cross(d) * 4.0 - cross(2.0 * d)) / 3.0;
            hessian[a][b] = h.clone();
            hessian[b][a] = h;
        }
    }
    Derivatives { x, jacobian, hessian }
}

/// Unit normal to the column space of `j` ((n+1) × n) with det[J | N] > 0.
pub fn tangent_normal(j: &DMatrix<f64>) -> Result<DVector<f64>> {
    let (m, n) = j.shape();
    if m != n + 1 {
        return Err(Error::Dimension(format!("Jacobian is {m}x{n}, expected (n+1) x n")));
    }
    let cols: Vec<DVector<f64>> = (0..n).map(|a| j.column(a).into_owned()).collect();
    let mut best = super::complement_seeded(&cols, &[], 1);
    let Some(mut nrm) = best.pop() else {
        return Err(Error::Regularity("tangent vectors do not span a hyperplane".into()));
    };
    let mut full = DMatrix::zeros(m, m);
    full.view_mut((0, 0), (m, n)).copy_from(j);
    full.set_column(n, &nrm);
    if full.determinant() < 0.0 {
        nrm = -nrm;
    }
    Ok(nrm)
}

/// Spectrum of the shape operator at a point.
#[derive(Debug, Clone)]
pub struct ShapeSpectrum {
    /// Principal curvatures κ of A = −dN, ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit tangent eigen-directions in R^{n+1}, matching `eigenvalues`.
    pub eigenvectors: Vec<DVector<f64>>,
    /// The same directions in parameter coordinates.
    pub parameter_directions: Vec<DVector<f64>>,
    pub type_number: usize,
    pub classification: Classification,
    pub normal: DVector<f64>,
    pub derivatives: Derivatives,
    pub tau: f64,
}

impl ShapeSpectrum {
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn mean_curvature(&self) -> f64 {
        self.trace() / self.eigenvalues.len() as f64
    }

    /// Indices of the two eigenvalues largest in modulus, ordered so the first
    /// is the larger signed value.
    pub fn principal_pair(&self) -> (usize, usize) {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| self.eigenvalues[b].abs().total_cmp(&self.eigenvalues[a].abs()));
        let (a, b) = (idx[0], idx[1.min(idx.len() - 1)]);
        if self.eigenvalues[a] >= self.eigenvalues[b] {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Indices of all eigenvalues except the principal pair.
    pub fn null_indices(&self) -> Vec<usize> {
        let (a, b) = self.principal_pair();
        (0..self.eigenvalues.len()).filter(|&k| k != a && k != b).collect()
    }

    /// Largest |κ| among the eigenvalues outside the principal pair.
    pub fn max_null(&self) -> f64 {
        self.null_indices().iter().map(|&k| self.eigenvalues[k].abs()).fold(0.0, f64::max)
    }
}

/// Principal curvatures of a map at `p`: FD tangents and normal, the matrix
/// II_ab = X_ab · N, and the generalized symmetric eigenproblem II c = κ g c.
pub fn shape_spectrum(map: &dyn HypersurfaceMap, p: &[f64], opts: &SpectrumOptions) -> Result<ShapeSpectrum> {
    let n = map.n();
    if p.len() != n {
        return Err(Error::Dimension(format!("point has {} coordinates, map needs {n}", p.len())));
    }
    spectrum_from(derivatives(map, p, opts.step), opts)
}

pub(super) fn spectrum_from(d: Derivatives, opts: &SpectrumOptions) -> Result<ShapeSpectrum> {
    let j = &d.jacobian;
    let n = j.ncols();
    let sv = j.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > opts.rank_tol * smax) {
        return Err(Error::Regularity(format!("Jacobian rank deficient: singular values {smin:.3e} / {smax:.3e}")));
    }
    let nrm = tangent_normal(j)?;
    let metric = j.transpose() * j;
    let second = DMatrix::from_fn(n, n, |a, b| d.hessian[a][b].dot(&nrm));
    let chol = metric
        .clone()
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("metric is not positive definite".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
    let mut reduced = &linv * &second * linv.transpose();
    reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = reduced.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut parameter_directions = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(eig.eigenvalues[k]);
        let c = linv.transpose() * eig.eigenvectors.column(k);
        let t = j * &c;
        let s = t.norm();
        eigenvectors.push(t / s);
        parameter_directions.push(c / s);
    }
    let tau = opts.tau;
    let nonzero: Vec<f64> = eigenvalues.iter().copied().filter(|k| k.abs() > tau).collect();
    let type_number = nonzero.len();
    let classification = match type_number {
        0 => Classification::Flat,
        1 => Classification::TypeOne,
        2 if (nonzero[0] - nonzero[1]).abs() < tau => Classification::BiUmbilical,
        2 => Classification::TypeTwo,
        _ => Classification::Other,
    };
    Ok(ShapeSpectrum {
        eigenvalues,
        eigenvectors,
        parameter_directions,
        type_number,
        classification,
        normal: nrm,
        derivatives: d,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Affine;
    impl HypersurfaceMap for Affine {
        fn n(&self) -> usize {
            3
        }
        fn eval(&self, p: &[f64]) -> DVector<f64> {
            DVector::from_vec(vec![p[0] + 2.0 * p[1], p[1] - p[2], 3.0 * p[2], 1.0 + p[0]])
        }
    }

    struct Sphere3;
    impl HypersurfaceMap for Sphere3 {
        fn n(&self) -> usize {
            2
        }
        fn eval(&self, p: &[f64]) -> DVector<f64> {
            let (u, v) = (p[0], p[1]);
            DVector::from_vec(vec![2.0 * u.cos() * v.cos(), 2.0 * u.cos() * v.sin(), 2.0 * u.sin()])
        }
    }

    #[test]
    fn hyperplane_is_flat() {
        let s = shape_spectrum(&Affine, &[0.3, -0.2, 0.5], &SpectrumOptions::default()).unwrap();
        assert_eq!(s.classification, Classification::Flat);
        assert_eq!(s.type_number, 0);
        assert!(s.eigenvalues.iter().all(|k| k.abs() < 1e-8));
    }

    #[test]
    fn round_sphere_is_umbilic_with_curvature_of_the_inner_normal() {
        let s = shape_spectrum(&Sphere3, &[0.4, 1.1], &SpectrumOptions::default()).unwrap();
        // det[J | N] > 0 selects the inward normal for this chart
        let x = &s.derivatives.x;
        let inward = s.normal.dot(x) < 0.0;
        let expect = if inward { 0.5 } else { -0.5 };
        for k in &s.eigenvalues {
            assert!((k - expect).abs() < 1e-8, "{k}");
        }
        assert_eq!(s.classification, Classification::BiUmbilical);
    }

    #[test]
    fn normal_is_unit_and_orthogonal() {
        let d = derivatives(&Affine, &[0.0, 0.0, 0.0], 1e-3);
        let nrm = tangent_normal(&d.jacobian).unwrap();
        assert!((nrm.norm() - 1.0).abs() < 1e-14);
        assert!((d.jacobian.transpose() * &nrm).abs().max() < 1e-12);
    }
}
