//! Analytic test vectors: an exact plane-wave solution of the sinh-Poisson
//! equation and closed-form surface charts.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::hypersurface::SurfaceChart;
use crate::sinh_poisson::NormalCurvatureField;

/// Profile φ(s) with φ'' = -4 sinh φ, so that f(u, v) = φ(u cos θ + v sin θ)
/// solves Δf + 4 sinh f = 0 exactly.
///
/// φ is tabulated by RK4 on a fine step and evaluated by quintic Hermite
/// interpolation using the exact second derivative.
#[derive(Debug, Clone)]
pub struct PlaneWaveProfile {
    s_min: f64,
    step: f64,
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

const PROFILE_STEP: f64 = 1.0 / 4096.0;

impl PlaneWaveProfile {
    /// Tabulate on `[s_min, s_max]` (which must contain 0) from φ(0), φ'(0).
    pub fn new(phi0: f64, dphi0: f64, s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_min <= 0.0 && s_max >= 0.0 && phi0.is_finite() && dphi0.is_finite()) {
            return Err(Error::InvalidParameter("profile interval must contain 0 and data must be finite".into()));
        }
        let n_left = (-s_min / PROFILE_STEP).ceil() as usize + 2;
        let n_right = (s_max / PROFILE_STEP).ceil() as usize + 2;
        let march = |n: usize, h: f64| {
            let mut out = Vec::with_capacity(n + 1);
            let (mut y, mut p) = (phi0, dphi0);
            out.push((y, p));
            for _ in 0..n {
                let acc = |y: f64| -4.0 * y.sinh();
                let (k1y, k1p) = (p, acc(y));
                let (k2y, k2p) = (p + 0.5 * h * k1p, acc(y + 0.5 * h * k1y));
                let (k3y, k3p) = (p + 0.5 * h * k2p, acc(y + 0.5 * h * k2y));
                let (k4y, k4p) = (p + h * k3p, acc(y + h * k3y));
                y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
                p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
                if !(y.is_finite() && p.is_finite()) {
                    return None;
                }
                out.push((y, p));
            }
            Some(out)
        };
        let left = march(n_left, -PROFILE_STEP);
        let right = march(n_right, PROFILE_STEP);
        let (Some(left), Some(right)) = (left, right) else {
            return Err(Error::InvalidParameter("profile blows up inside the requested interval".into()));
        };
        let mut phi = Vec::with_capacity(n_left + n_right + 1);
        let mut dphi = Vec::with_capacity(n_left + n_right + 1);
        for &(y, p) in left.iter().rev().chain(right.iter().skip(1)) {
            phi.push(y);
            dphi.push(p);
        }
        Ok(PlaneWaveProfile {
            s_min: -(n_left as f64) * PROFILE_STEP,
            step: PROFILE_STEP,
            phi,
            dphi,
        })
    }

    fn s_max(&self) -> f64 {
        self.s_min + (self.phi.len() - 1) as f64 * self.step
    }

    /// (φ, φ', φ'') at `s`.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        let t = ((s - self.s_min) / self.step).clamp(0.0, (self.phi.len() - 1) as f64);
        let k = (t.floor() as usize).min(self.phi.len() - 2);
        let x = t - k as f64;
        let h = self.step;
        let (y0, y1) = (self.phi[k], self.phi[k + 1]);
        let (p0, p1) = (self.dphi[k] * h, self.dphi[k + 1] * h);
        let (a0, a1) = (-4.0 * y0.sinh() * h * h, -4.0 * y1.sinh() * h * h);
        let (x2, x3) = (x * x, x * x * x);
        let (x4, x5) = (x3 * x, x3 * x2);
        // quintic Hermite basis on [0, 1]
        let h0 = 1.0 - 10.0 * x3 + 15.0 * x4 - 6.0 * x5;
        let h1 = x - 6.0 * x3 + 8.0 * x4 - 3.0 * x5;
        let h2 = 0.5 * (x2 - 3.0 * x3 + 3.0 * x4 - x5);
        let h3 = 0.5 * (x3 - 2.0 * x4 + x5);
        let h4 = -4.0 * x3 + 7.0 * x4 - 3.0 * x5;
        let h5 = 10.0 * x3 - 15.0 * x4 + 6.0 * x5;
        let d0 = -30.0 * x2 + 60.0 * x3 - 30.0 * x4;
        let d1 = 1.0 - 18.0 * x2 + 32.0 * x3 - 15.0 * x4;
        let d2 = 0.5 * (2.0 * x - 9.0 * x2 + 12.0 * x3 - 5.0 * x4);
        let d3 = 0.5 * (3.0 * x2 - 8.0 * x3 + 5.0 * x4);
        let d4 = -12.0 * x2 + 28.0 * x3 - 15.0 * x4;
        let d5 = -d0;
        let y = h0 * y0 + h1 * p0 + h2 * a0 + h3 * a1 + h4 * p1 + h5 * y1;
        let p = (d0 * y0 + d1 * p0 + d2 * a0 + d3 * a1 + d4 * p1 + d5 * y1) / h;
        (y, p, -4.0 * y.sinh())
    }
}

/// Exact strongly regular solution f = φ(u cos θ + v sin θ) of Δf + 4 sinh f = 0.
#[derive(Debug, Clone)]
pub struct PlaneWave {
    pub theta: f64,
    profile: PlaneWaveProfile,
}

impl PlaneWave {
    /// Profile tabulated for every point within `radius` of the origin.
    pub fn new(theta: f64, phi0: f64, dphi0: f64, radius: f64) -> Result<Self> {
        Ok(PlaneWave {
            theta,
            profile: PlaneWaveProfile::new(phi0, dphi0, -radius, radius)?,
        })
    }

    /// Default test solution: θ = π/8, φ(0) = 0, φ'(0) = 1. φ' > 0 for
    /// |s| < 0.78, so ∇ν has no zero component on [−0.5, 0.5]² for any
    /// rotation angle keeping θ away from multiples of π/2.
    pub fn standard() -> Self {
        Self::new(std::f64::consts::FRAC_PI_8, 0.0, 1.0, 2.0).expect("standard profile is finite on [-2, 2]")
    }

    fn arg(&self, u: f64, v: f64) -> f64 {
        let s = u * self.theta.cos() + v * self.theta.sin();
        debug_assert!(s >= self.profile.s_min && s <= self.profile.s_max());
        s
    }

    /// f = ln ν.
    pub fn f(&self, u: f64, v: f64) -> f64 {
        self.profile.eval(self.arg(u, v)).0
    }

    pub fn nu(&self, u: f64, v: f64) -> f64 {
        self.f(u, v).exp()
    }

    /// (ν_u, ν_v).
    pub fn grad_nu(&self, u: f64, v: f64) -> (f64, f64) {
        let (y, p, _) = self.profile.eval(self.arg(u, v));
        let e = y.exp();
        (e * p * self.theta.cos(), e * p * self.theta.sin())
    }

    pub fn log_field(&self, grid: Grid2D) -> Result<ScalarField> {
        ScalarField::from_fn(grid, |u, v| self.f(u, v))
    }

    pub fn nu_field(&self, grid: Grid2D) -> Result<NormalCurvatureField> {
        NormalCurvatureField::new(ScalarField::from_fn(grid, |u, v| self.nu(u, v))?)
    }

    /// The same wave with arguments rotated by `t`: ν(cos t u − sin t v, sin t u + cos t v).
    pub fn rotated(&self, t: f64) -> PlaneWave {
        PlaneWave {
            theta: self.theta - t,
            profile: self.profile.clone(),
        }
    }
}

/// Clifford torus (cos u, sin u, cos v, sin v) r/√2 on the sphere of radius `r`.
#[derive(Debug, Clone, Copy)]
pub struct CliffordTorus {
    pub radius: f64,
}

impl SurfaceChart for CliffordTorus {
    fn dim(&self) -> usize {
        4
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        let s = self.radius / std::f64::consts::SQRT_2;
        DVector::from_vec(vec![s * u.cos(), s * u.sin(), s * v.cos(), s * v.sin()])
    }
}

/// Great 2-sphere (cos u cos v, cos u sin v, sin u, 0) in the unit 3-sphere.
#[derive(Debug, Clone, Copy)]
pub struct GreatSphere;

impl SurfaceChart for GreatSphere {
    fn dim(&self) -> usize {
        4
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u.cos() * v.cos(), u.cos() * v.sin(), u.sin(), 0.0])
    }
}

/// Catenoid (cosh u cos v, cosh u sin v, u); principal curvatures ±sech²u.
#[derive(Debug, Clone, Copy)]
pub struct Catenoid;

impl SurfaceChart for Catenoid {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u.cosh() * v.cos(), u.cosh() * v.sin(), u])
    }
}

/// Helicoid (sinh u cos v, sinh u sin v, v); principal curvatures ±sech²u.
#[derive(Debug, Clone, Copy)]
pub struct Helicoid;

impl SurfaceChart for Helicoid {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u.sinh() * v.cos(), u.sinh() * v.sin(), v])
    }
}

/// Conformal (Mercator) chart r (sech u cos v, sech u sin v, tanh u) of a round 2-sphere.
#[derive(Debug, Clone, Copy)]
pub struct MercatorSphere {
    pub radius: f64,
}

impl SurfaceChart for MercatorSphere {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        let s = self.radius / u.cosh();
        DVector::from_vec(vec![s * v.cos(), s * v.sin(), self.radius * u.tanh()])
    }
}

/// Latitude-longitude chart (cos u cos v, cos u sin v, sin u) of the unit 2-sphere; not conformal.
#[derive(Debug, Clone, Copy)]
pub struct LatLongSphere;

impl SurfaceChart for LatLongSphere {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u.cos() * v.cos(), u.cos() * v.sin(), u.sin()])
    }
}

/// Graph of a plane, z = 0.
#[derive(Debug, Clone, Copy)]
pub struct Plane;

impl SurfaceChart for Plane {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u, v, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinh_poisson::residual_f_form;

    #[test]
    fn profile_conserves_energy_and_satisfies_the_ode() {
        let p = PlaneWaveProfile::new(0.0, 1.0, -0.8, 0.8).unwrap();
        // φ'^2 / 2 + 4 cosh φ is conserved
        let e0 = 0.5 + 4.0;
        for k in 0..=160 {
            let s = -0.8 + 0.01 * k as f64;
            let (y, dy, _) = p.eval(s);
            assert!((0.5 * dy * dy + 4.0 * y.cosh() - e0).abs() < 1e-11, "s={s}");
            assert!(dy <= 1.0 + 1e-15);
            if s.abs() <= 0.75 {
                assert!(dy > 0.0, "s={s}");
            }
        }
        let (y, dy, _) = p.eval(0.0);
        assert!(y.abs() < 1e-15 && (dy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plane_wave_discrete_residual_is_second_order() {
        let w = PlaneWave::standard();
        let mut prev = None;
        for n in [21, 41, 81] {
            let g = Grid2D::square(-0.5, 0.5, n).unwrap();
            let r = residual_f_form(&w.log_field(g).unwrap()).unwrap().max_abs();
            if let Some(p) = prev {
                let ratio: f64 = p / r;
                assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn rotation_shifts_the_angle() {
        let w = PlaneWave::standard();
        let t = 0.7;
        let r = w.rotated(t);
        let (u, v) = (0.21, -0.13);
        let (ru, rv) = (t.cos() * u - t.sin() * v, t.sin() * u + t.cos() * v);
        assert!((r.nu(u, v) - w.nu(ru, rv)).abs() < 1e-14);
    }
}
