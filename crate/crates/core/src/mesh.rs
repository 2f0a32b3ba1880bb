//! Wavefront OBJ export of sampled surfaces, projected to R³.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::VectorField;

/// Nodes closer than this to the projection pole are rejected.
pub const POLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// From the pole (0, 0, 0, −1): x ↦ (x₁, x₂, x₃) / (1 + x₄).
    #[default]
    Stereographic,
    /// From the pole (0, 0, 0, +1): x ↦ (x₁, x₂, x₃) / (1 − x₄).
    StereographicNorth,
    /// Keep the first three coordinates.
    DropCoordinate,
}

impl Projection {
    pub fn as_str(&self) -> &'static str {
        match self {
            Projection::Stereographic => "stereographic",
            Projection::StereographicNorth => "stereographic-north",
            Projection::DropCoordinate => "drop-coordinate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stereographic" => Some(Projection::Stereographic),
            "stereographic-north" => Some(Projection::StereographicNorth),
            "drop-coordinate" => Some(Projection::DropCoordinate),
            _ => None,
        }
    }
}

/// Image of one point under the projection.
pub fn project_point(x: &[f64], projection: Projection) -> Result<[f64; 3]> {
    if x.len() < 3 {
        return Err(Error::Dimension(format!("cannot project a point of dimension {}", x.len())));
    }
    let sign = match projection {
        Projection::DropCoordinate => return Ok([x[0], x[1], x[2]]),
        Projection::Stereographic => -1.0,
        Projection::StereographicNorth => 1.0,
    };
    if x.len() != 4 {
        return Err(Error::Dimension(format!(
            "stereographic projection needs points in R^4, got dimension {}",
            x.len()
        )));
    }
    let dist = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + (x[3] - sign).powi(2)).sqrt();
    if dist < POLE_TOL {
        let alternate = match projection {
            Projection::Stereographic => Projection::StereographicNorth,
            _ => Projection::Stereographic,
        };
        return Err(Error::Projection(format!(
            "point within {POLE_TOL:e} of the pole (0, 0, 0, {sign}); use --projection {}",
            alternate.as_str()
        )));
    }
    let d = 1.0 - sign * x[3];
    Ok([x[0] / d, x[1] / d, x[2] / d])
}

/// OBJ text: one vertex per node in grid order (u fastest), one quad per cell.
pub fn obj_string(points: &VectorField, projection: Projection) -> Result<String> {
    let g = *points.grid();
    let nodes: Vec<&[f64]> = points.nodes().collect();
    obj_from_nodes(g.nu(), g.nv(), &nodes, projection)
}

/// Same as [`obj_string`] for a raw `nu × nv` node array (u fastest); any
/// size from 2 × 2 upward.
pub fn obj_from_nodes(nu: usize, nv: usize, nodes: &[&[f64]], projection: Projection) -> Result<String> {
    if nu < 2 || nv < 2 || nodes.len() != nu * nv {
        return Err(Error::Dimension(format!("{} nodes do not form a {nu} x {nv} mesh", nodes.len())));
    }
    let mut out = String::new();
    writeln!(out, "# {nu} x {nv} grid, projection {}", projection.as_str()).unwrap();
    for x in nodes {
        let [a, b, c] = project_point(x, projection)?;
        writeln!(out, "v {a} {b} {c}").unwrap();
    }
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let k = j * nu + i + 1;
            let up = k + nu;
            writeln!(out, "f {} {} {} {}", k, k + 1, up + 1, up).unwrap();
        }
    }
    Ok(out)
}

pub fn export_mesh(points: &VectorField, projection: Projection, path: &Path) -> Result<()> {
    std::fs::write(path, obj_string(points, projection)?)?;
    Ok(())
}
