use nalgebra::{DMatrix, DVector};

use super::spectrum::{chart_derivatives, spectrum_from, Derivatives, SpectrumOptions};
use super::{complement_seeded, HypersurfaceMap, SurfaceChart};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::interp::BicubicSpline;
use crate::surface::SurfaceS3;

fn unit(dim: usize, k: usize) -> DVector<f64> {
    DVector::from_fn(dim, |i, _| if i == k { 1.0 } else { 0.0 })
}

fn embed(x: &DVector<f64>, dim: usize) -> DVector<f64> {
    let mut out = DVector::zeros(dim);
    out.rows_mut(0, x.len()).copy_from(x);
    out
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("hypersurface dimension must be at least 3, got {n}")));
    }
    Ok(())
}

/// Derivative step for building tangents of analytic charts.
const CHART_STEP: f64 = 1e-3;

/// A two-parameter chart viewed as a hypersurface of R^{dim} when dim = 3.
pub struct ChartMap<'a>(pub &'a dyn SurfaceChart);

impl HypersurfaceMap for ChartMap<'_> {
    fn n(&self) -> usize {
        2
    }
    fn eval(&self, p: &[f64]) -> DVector<f64> {
        self.0.eval(p[0], p[1])
    }
}

/// Sample points (u, v) on a regular 5 × 5 lattice inside `domain`.
fn lattice(domain: [f64; 4]) -> impl Iterator<Item = (f64, f64)> {
    let [u0, u1, v0, v1] = domain;
    (0..25).map(move |k| {
        let (a, b) = ((k % 5) as f64 / 4.0, (k / 5) as f64 / 4.0);
        (u0 + (u1 - u0) * (0.1 + 0.8 * a), v0 + (v1 - v0) * (0.1 + 0.8 * b))
    })
}

/// Bi-umbilical hypersurface over a round 2-sphere S²(r_s) ⊂ R³ ⊂ R^{n+1}:
/// X = z + Σ w^α e_α with e₁ = −sin α N̄ + cos α e, e = e₄, and e_α = e_{α+2}
/// for α ≥ 2; the normal is N = cos α N̄ + sin α e.
pub struct BiUmbilical {
    sphere: Box<dyn SurfaceChart>,
    pub radius: f64,
    pub alpha: f64,
    n: usize,
}

impl BiUmbilical {
    /// `sphere` must parameterize the sphere of radius `radius` centered at the origin of R³.
    pub fn new(sphere: Box<dyn SurfaceChart>, radius: f64, alpha: f64, n: usize) -> Result<Self> {
        check_n(n)?;
        if !(radius > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter("radius must be positive and alpha finite".into()));
        }
        if sphere.dim() != 3 {
            return Err(Error::Dimension("sphere chart must take values in R^3".into()));
        }
        for (u, v) in lattice([-1.0, 1.0, -1.0, 1.0]) {
            let r = sphere.eval(u, v).norm();
            if (r - radius).abs() > 1e-9 * radius {
                return Err(Error::InvalidParameter(format!(
                    "chart point at distance {r} from the origin, expected {radius}"
                )));
            }
        }
        Ok(BiUmbilical { sphere, radius, alpha, n })
    }

    fn frame(&self, u: f64, v: f64) -> (DVector<f64>, DVector<f64>, Vec<DVector<f64>>) {
        let m = self.n + 1;
        let z = embed(&self.sphere.eval(u, v), m);
        let nbar = &z / self.radius;
        let e = unit(m, 3);
        let (s, c) = self.alpha.sin_cos();
        let mut gens = vec![&nbar * (-s) + &e * c];
        gens.extend((4..m).map(|k| unit(m, k)));
        let normal = nbar * c + e * s;
        (z, normal, gens)
    }

    /// Predicted normal N at (u, v).
    pub fn predicted_normal(&self, u: f64, v: f64) -> DVector<f64> {
        self.frame(u, v).1
    }
}

impl HypersurfaceMap for BiUmbilical {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, p: &[f64]) -> DVector<f64> {
        let (mut x, _, gens) = self.frame(p[0], p[1]);
        for (w, b) in p[2..].iter().zip(&gens) {
            x.axpy(*w, b, 1.0);
        }
        x
    }
    fn normal(&self, p: &[f64]) -> Option<DVector<f64>> {
        Some(self.predicted_normal(p[0], p[1]))
    }
}

/// Product hypersurface z(u, v) + Σ w^α e_{3+α} over a minimal surface in R³.
pub struct MinimalFromR3 {
    chart: Box<dyn SurfaceChart>,
    n: usize,
    /// Largest |mean curvature| measured on the sample lattice.
    pub mean_curvature: f64,
}

impl MinimalFromR3 {
    /// Checks minimality of `chart` on a lattice inside `domain = [u0, u1, v0, v1]`.
    pub fn new(chart: Box<dyn SurfaceChart>, n: usize, domain: [f64; 4], tol: f64) -> Result<Self> {
        check_n(n)?;
        if chart.dim() != 3 {
            return Err(Error::Dimension("surface chart must take values in R^3".into()));
        }
        let opts = SpectrumOptions::default();
        let mut h: f64 = 0.0;
        for (u, v) in lattice(domain) {
            let s = spectrum_from(chart_derivatives(chart.as_ref(), u, v, opts.step), &opts)?;
            h = h.max(s.mean_curvature().abs());
        }
        if !(h < tol) {
            return Err(Error::NonMinimal { mean_curvature: h, tol });
        }
        Ok(MinimalFromR3 { chart, n, mean_curvature: h })
    }
}

impl HypersurfaceMap for MinimalFromR3 {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, p: &[f64]) -> DVector<f64> {
        let mut x = embed(&self.chart.eval(p[0], p[1]), self.n + 1);
        for (a, w) in p[2..].iter().enumerate() {
            x[3 + a] += w;
        }
        x
    }
    fn normal(&self, p: &[f64]) -> Option<DVector<f64>> {
        let d = chart_derivatives(self.chart.as_ref(), p[0], p[1], CHART_STEP);
        let c = d.jacobian.column(0).cross(&d.jacobian.column(1));
        Some(embed(&(&c / c.norm()), self.n + 1))
    }
}

/// Unit normal of a surface in the sphere |x| = r ⊂ R⁴ with det[z_u, z_v, N, z] > 0.
fn sphere_normal(d: &Derivatives) -> Option<DVector<f64>> {
    let rows = [d.jacobian.column(0).into_owned(), d.jacobian.column(1).into_owned(), d.x.clone()];
    let mut c = DVector::zeros(4);
    for i in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let m = DMatrix::from_fn(3, 3, |r, q| rows[r][cols[q]]);
        c[i] = if (i + 3) % 2 == 0 { 1.0 } else { -1.0 } * m.determinant();
    }
    let r = c.norm();
    (r > 1e-12).then(|| -c / r)
}

type Generators = (DVector<f64>, Vec<DVector<f64>>, DVector<f64>);

/// Hypersurface z(u, v) + Σ w^α b_α(u, v) over a minimal surface in a sphere
/// S³(r) ⊂ R⁴ ⊂ R^{n+1}, with b_α spanning the complement of span{z_u, z_v, N}.
pub struct MinimalFromS3 {
    chart: Box<dyn SurfaceChart>,
    n: usize,
    pub radius: f64,
    seeds: Vec<DVector<f64>>,
    /// Largest |mean curvature in S³| measured on the sample lattice.
    pub mean_curvature: f64,
}

impl MinimalFromS3 {
    /// `base` fixes the point whose completion seeds the b_α fields.
    pub fn new(chart: Box<dyn SurfaceChart>, n: usize, domain: [f64; 4], base: (f64, f64), tol: f64) -> Result<Self> {
        check_n(n)?;
        if chart.dim() != 4 {
            return Err(Error::Dimension("surface chart must take values in R^4".into()));
        }
        let radius = chart.eval(base.0, base.1).norm();
        let mut h: f64 = 0.0;
        for (u, v) in lattice(domain) {
            let d = chart_derivatives(chart.as_ref(), u, v, CHART_STEP);
            if (d.x.norm() - radius).abs() > 1e-8 * radius {
                return Err(Error::InvalidParameter("chart does not lie on a sphere centered at the origin".into()));
            }
            let nrm = sphere_normal(&d).ok_or_else(|| Error::Regularity(format!("chart is singular at ({u}, {v})")))?;
            let g = d.jacobian.transpose() * &d.jacobian;
            let ii = DMatrix::from_fn(2, 2, |a, b| d.hessian[a][b].dot(&nrm));
            let ginv = g.try_inverse().ok_or_else(|| Error::Regularity("degenerate metric".into()))?;
            h = h.max((0.5 * (ginv * ii).trace()).abs());
        }
        if !(h < tol) {
            return Err(Error::NonMinimal { mean_curvature: h, tol });
        }
        let mut map = MinimalFromS3 {
            chart,
            n,
            radius,
            seeds: Vec::new(),
            mean_curvature: h,
        };
        map.seeds = map
            .generators_seeded(base.0, base.1, &[])
            .ok_or_else(|| Error::Regularity("chart is singular at the base point".into()))?
            .1;
        Ok(map)
    }

    /// (point, generators, normal) at (u, v).
    fn generators_seeded(&self, u: f64, v: f64, seeds: &[DVector<f64>]) -> Option<Generators> {
        let m = self.n + 1;
        let d = chart_derivatives(self.chart.as_ref(), u, v, CHART_STEP);
        let nrm = embed(&sphere_normal(&d)?, m);
        let span = [
            embed(&d.jacobian.column(0).into_owned(), m),
            embed(&d.jacobian.column(1).into_owned(), m),
            nrm.clone(),
        ];
        let gens = complement_seeded(&span, seeds, self.n - 2);
        Some((embed(&d.x, m), gens, nrm))
    }

    /// Generator directions b_α(u, v).
    pub fn generators(&self, u: f64, v: f64) -> Vec<DVector<f64>> {
        self.generators_seeded(u, v, &self.seeds).map(|g| g.1).unwrap_or_default()
    }
}

impl HypersurfaceMap for MinimalFromS3 {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, p: &[f64]) -> DVector<f64> {
        let m = self.n + 1;
        let Some((mut x, gens, _)) = self.generators_seeded(p[0], p[1], &self.seeds) else {
            return DVector::from_element(m, f64::NAN);
        };
        for (w, b) in p[2..].iter().zip(&gens) {
            x.axpy(*w, b, 1.0);
        }
        x
    }
    fn normal(&self, p: &[f64]) -> Option<DVector<f64>> {
        self.generators_seeded(p[0], p[1], &self.seeds).map(|g| g.2)
    }
}

/// Chart of a discrete surface in S³ through bicubic interpolation of l,
/// renormalized onto the sphere.
pub struct SplineChart {
    spline: BicubicSpline,
}

impl SplineChart {
    pub fn new(s: &SurfaceS3) -> Self {
        SplineChart {
            spline: BicubicSpline::from_vector(s.l()),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.spline.grid()
    }
}

impl SurfaceChart for SplineChart {
    fn dim(&self) -> usize {
        4
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        match self.spline.eval(u, v) {
            Ok(x) => {
                let x = DVector::from_vec(x);
                let r = x.norm();
                x / r
            }
            Err(_) => DVector::from_element(4, f64::NAN),
        }
    }
}
