//! Hypersurfaces of type number two in R^{n+1}: constructions from spheres and
//! minimal surfaces, shape-operator spectra, connection scalars, and the
//! envelope (normal, support function) description with its residual systems.
//!
//! Sign convention: eigenvalues κ are those of the shape operator `A = −dN`,
//! so the second fundamental form is `II = D²X · N`. The normal curvatures of
//! the frame formulas (`A X = −ν₁ X`) are `ν = −κ`.

use nalgebra::DVector;

mod connection;
mod construct;
mod envelope;
mod fit;
mod spectrum;

pub use connection::{connection_scalars, ConnectionOptions, ConnectionScalars};
pub use construct::{BiUmbilical, ChartMap, MinimalFromR3, MinimalFromS3, SplineChart};
pub use envelope::{
    biumbilical_system_residual, biumbilical_system_residual_unchecked, envelope_point, extract_chart, minimal_system_residual,
    minimal_system_residual_unchecked, normal_constancy, HypersurfaceChart, W2_MIN,
};
pub use fit::{fit_sphere, integral_surface_check, IntegralSurfaceReport, SphereFit};
pub use spectrum::{chart_derivatives, derivatives, shape_spectrum, tangent_normal, Classification, Derivatives, ShapeSpectrum, SpectrumOptions};

/// Parameterized surface (u, v) ↦ R^dim.
pub trait SurfaceChart: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, u: f64, v: f64) -> DVector<f64>;
}

/// Parameterized hypersurface p = (u, v, w¹, …, w^{n−2}) ↦ R^{n+1}.
pub trait HypersurfaceMap: Send + Sync {
    /// Hypersurface dimension n (number of parameters).
    fn n(&self) -> usize;
    fn eval(&self, p: &[f64]) -> DVector<f64>;
    /// Unit normal known in closed form (constant along generators), if any.
    fn normal(&self, _p: &[f64]) -> Option<DVector<f64>> {
        None
    }
}

/// Orthonormal basis of the orthogonal complement of `span`, obtained by
/// projecting `seeds` (then the standard basis, as needed) and applying
/// Gram-Schmidt; returns `count` vectors.
pub fn complement_seeded(span: &[DVector<f64>], seeds: &[DVector<f64>], count: usize) -> Vec<DVector<f64>> {
    let dim = span.first().or(seeds.first()).map(|v| v.len()).unwrap_or(0);
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(span.len() + count);
    let push = |q: &mut Vec<DVector<f64>>, v: &DVector<f64>| -> bool {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in q.iter() {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
        }
        let r = w.norm();
        if r > 1e-6 * v.norm().max(1e-300) {
            q.push(w / r);
            true
        } else {
            false
        }
    };
    for v in span {
        push(&mut q, v);
    }
    let base = q.len();
    let standard = (0..dim).map(|k| DVector::from_fn(dim, |i, _| if i == k { 1.0 } else { 0.0 }));
    for s in seeds.iter().cloned().chain(standard) {
        if q.len() - base == count {
            break;
        }
        push(&mut q, &s);
    }
    q.split_off(base)
}
