use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{MaskedField, ScalarField, VectorField};

/// Singular values below this fraction of the largest count as flat directions.
const AFFINE_TOL: f64 = 1e-9;

/// Least-squares sphere through a point cloud, fitted inside the affine hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereFit {
    pub center: Vec<f64>,
    pub radius: f64,
    /// max_k | |y_k − c| − R |.
    pub residual: f64,
    /// Dimension of the affine hull of the points.
    pub affine_dim: usize,
}

struct AffineHull {
    origin: DVector<f64>,
    /// Orthonormal directions as columns.
    axes: DMatrix<f64>,
}

impl AffineHull {
    fn of(points: &[DVector<f64>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidParameter("empty point cloud".into()));
        };
        let m = first.len();
        let mut origin = DVector::zeros(m);
        for p in points {
            if p.len() != m {
                return Err(Error::Dimension("points of different dimensions".into()));
            }
            origin += p;
        }
        origin /= points.len() as f64;
        let centered = DMatrix::from_fn(m, points.len(), |r, c| points[c][r] - origin[r]);
        let svd = centered.svd(true, false);
        let u = svd.u.ok_or_else(|| Error::LinearAlgebra("SVD failed".into()))?;
        let smax = svd.singular_values.max();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > AFFINE_TOL * smax.max(1e-300))
            .collect();
        let axes = DMatrix::from_fn(m, keep.len(), |r, c| u[(r, keep[c])]);
        Ok(AffineHull { origin, axes })
    }

    fn dim(&self) -> usize {
        self.axes.ncols()
    }

    fn project(&self, p: &DVector<f64>) -> DVector<f64> {
        self.axes.transpose() * (p - &self.origin)
    }

    fn lift(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.origin + &self.axes * y
    }
}

fn fit_in(points: &[DVector<f64>]) -> Result<(DVector<f64>, f64, f64)> {
    let d = points[0].len();
    // |y|² = 2 c·y + k, with R² = k + |c|²
    let a = DMatrix::from_fn(points.len(), d + 1, |r, c| if c < d { 2.0 * points[r][c] } else { 1.0 });
    let b = DVector::from_fn(points.len(), |r, _| points[r].norm_squared());
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::LinearAlgebra(format!("sphere fit: {e}")))?;
    let c = sol.rows(0, d).into_owned();
    let r2 = sol[d] + c.norm_squared();
    if !(r2 > 0.0) {
        return Err(Error::LinearAlgebra("sphere fit gave a nonpositive squared radius".into()));
    }
    let radius = r2.sqrt();
    let residual = points.iter().map(|p| ((p - &c).norm() - radius).abs()).fold(0.0, f64::max);
    Ok((c, radius, residual))
}

/// Sphere fit inside the affine hull of `points`.
pub fn fit_sphere(points: &[DVector<f64>]) -> Result<SphereFit> {
    let hull = AffineHull::of(points)?;
    if hull.dim() < 2 || points.len() < hull.dim() + 2 {
        return Err(Error::InvalidParameter(format!(
            "{} points spanning an affine {}-space do not determine a sphere",
            points.len(),
            hull.dim()
        )));
    }
    let local: Vec<DVector<f64>> = points.iter().map(|p| hull.project(p)).collect();
    let (c, radius, residual) = fit_in(&local)?;
    Ok(SphereFit {
        center: hull.lift(&c).as_slice().to_vec(),
        radius,
        residual,
        affine_dim: hull.dim(),
    })
}

/// Geometry of a sampled integral surface: the space it spans and its mean
/// curvature there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralSurfaceReport {
    pub affine_dim: usize,
    /// Fitted 3-sphere when the surface spans an affine 4-space.
    pub sphere: Option<SphereFit>,
    /// Max |H| over interior nodes, in the fitted R³ or S³(r).
    pub mean_curvature: f64,
}

fn mean_curvature_field(y: &VectorField, normal: &VectorField) -> Result<MaskedField> {
    let (yu, yv) = (y.partial_u()?, y.partial_v()?);
    let (yuu, yuv, yvv) = (y.partial_uu()?, y.partial_uv()?, y.partial_vv()?);
    let (e1, f1, g1) = (yu.dot(&yu)?, yu.dot(&yv)?, yv.dot(&yv)?);
    let (e2, f2, g2) = (yuu.dot(normal)?, yuv.dot(normal)?, yvv.dot(normal)?);
    let vals = (0..y.grid().len())
        .map(|k| {
            let (e, f, g) = (e1.values()[k], f1.values()[k], g1.values()[k]);
            let (l, m, n) = (e2.values()[k], f2.values()[k], g2.values()[k]);
            (l * g - 2.0 * m * f + n * e) / (2.0 * (e * g - f * f))
        })
        .collect();
    Ok(MaskedField::interior(ScalarField::new(*y.grid(), vals)?))
}

/// Mean-curvature check of a sampled surface lying in an affine R³ or in a
/// round 3-sphere of an affine R⁴.
pub fn integral_surface_check(points: &VectorField) -> Result<IntegralSurfaceReport> {
    let grid = *points.grid();
    let pts: Vec<DVector<f64>> = points.nodes().map(DVector::from_column_slice).collect();
    let hull = AffineHull::of(&pts)?;
    let d = hull.dim();
    let local: Vec<DVector<f64>> = pts.iter().map(|p| hull.project(p)).collect();
    match d {
        3 => {
            let y = VectorField::from_nodes(grid, 3, &local.iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>())?;
            let (yu, yv) = (y.partial_u()?, y.partial_v()?);
            let normals: Vec<Vec<f64>> = (0..grid.len())
                .map(|k| {
                    let a = nalgebra::Vector3::from_column_slice(yu.at_index(k));
                    let b = nalgebra::Vector3::from_column_slice(yv.at_index(k));
                    let c = a.cross(&b);
                    (c / c.norm()).as_slice().to_vec()
                })
                .collect();
            let h = mean_curvature_field(&y, &VectorField::from_nodes(grid, 3, &normals)?)?;
            Ok(IntegralSurfaceReport {
                affine_dim: 3,
                sphere: None,
                mean_curvature: h.max_abs(),
            })
        }
        4 => {
            let (c, radius, residual) = fit_in(&local)?;
            let unit: Vec<Vec<f64>> = local.iter().map(|p| ((p - &c) / radius).as_slice().to_vec()).collect();
            let y = VectorField::from_nodes(grid, 4, &unit)?;
            let (yu, yv) = (y.partial_u()?, y.partial_v()?);
            let mut normals = Vec::with_capacity(grid.len());
            for k in 0..grid.len() {
                let nk = crate::surface::normal_from_tangents(yu.at_index(k), yv.at_index(k), y.at_index(k)).ok_or_else(|| {
                    let (i, j) = grid.node(k);
                    Error::Regularity(format!("integral surface is singular at node ({i}, {j})"))
                })?;
                normals.push(nk.to_vec());
            }
            let h = mean_curvature_field(&y, &VectorField::from_nodes(grid, 4, &normals)?)?;
            Ok(IntegralSurfaceReport {
                affine_dim: 4,
                sphere: Some(SphereFit {
                    center: hull.lift(&c).as_slice().to_vec(),
                    radius,
                    residual,
                    affine_dim: 4,
                }),
                mean_curvature: h.max_abs() / radius,
            })
        }
        _ => Err(Error::InvalidParameter(format!("integral surface spans an affine {d}-space, expected 3 or 4"))),
    }
}
