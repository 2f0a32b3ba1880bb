//! Moving-frame reconstruction of minimal surfaces in the 3-sphere from the
//! sinh-Poisson equation, their associated isometric families, and
//! type-number-two hypersurfaces built from spheres and minimal surfaces.

// `!(x > 0.0)` deliberately rejects NaN; index loops mirror the LAPACK band layout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod banded;
pub mod error;
pub mod family;
pub mod fixtures;
pub mod frame;
pub mod grid;
pub mod hypersurface;
pub mod interp;
pub mod io;
pub mod mesh;
pub mod report;
pub mod sinh_poisson;
pub mod surface;

pub use error::{Error, Result};
pub use grid::{Grid2D, MaskedField, ScalarField, VectorField, Window};
