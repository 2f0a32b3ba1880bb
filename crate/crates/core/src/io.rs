//! File formats: scalar fields as JSON `{quantity, grid, values}` or CSV
//! `u,v,value`, and surfaces as JSON `{grid, l, X, Y, N}`. Values are stored
//! in grid order, `u` fastest.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FrameField;
use crate::grid::{Grid2D, ScalarField, VectorField};
use crate::surface::SurfaceS3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    /// What the values are, e.g. "nu" or "f" (= ln ν).
    pub quantity: String,
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl FieldFile {
    pub fn new(quantity: &str, field: &ScalarField) -> Self {
        FieldFile {
            quantity: quantity.to_string(),
            grid: *field.grid(),
            values: field.values().to_vec(),
        }
    }

    pub fn field(&self) -> Result<ScalarField> {
        ScalarField::new(self.grid, self.values.clone())
    }
}

/// `u,v,value` rows in grid order.
pub fn field_csv(field: &ScalarField) -> String {
    let g = field.grid();
    let mut out = String::from("u,v,value\n");
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        let (u, v) = g.coords(i, j);
        out.push_str(&format!("{u},{v},{}\n", field.values()[k]));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub grid: Grid2D,
    pub l: Vec<[f64; 4]>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<[f64; 4]>>,
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<[f64; 4]>>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<[f64; 4]>>,
}

fn rows(f: &VectorField) -> Vec<[f64; 4]> {
    f.nodes().map(|x| [x[0], x[1], x[2], x[3]]).collect()
}

fn field_of(grid: Grid2D, rows: &[[f64; 4]]) -> Result<VectorField> {
    if rows.len() != grid.len() {
        return Err(Error::Dimension(format!("{} nodes for a grid of {}", rows.len(), grid.len())));
    }
    VectorField::new(grid, 4, rows.iter().flatten().copied().collect())
}

impl SurfaceFile {
    /// Positions from `surface`; X, Y, N from `frames` when given.
    pub fn new(surface: &SurfaceS3, frames: Option<&FrameField>) -> Self {
        SurfaceFile {
            grid: *surface.grid(),
            l: rows(surface.l()),
            x: frames.map(|f| rows(&f.x())),
            y: frames.map(|f| rows(&f.y())),
            n: frames.map(|f| rows(&f.n())).or_else(|| surface.normal().map(rows)),
        }
    }

    /// The surface without its stored normal (which is recomputed on demand).
    pub fn surface(&self) -> Result<SurfaceS3> {
        SurfaceS3::new(field_of(self.grid, &self.l)?, None)
    }

    pub fn normal(&self) -> Result<Option<VectorField>> {
        self.n.as_ref().map(|n| field_of(self.grid, n)).transpose()
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trips_through_json() {
        let g = Grid2D::new(0.0, 1.0, 3, -1.0, 1.0, 4).unwrap();
        let f = ScalarField::from_fn(g, |u, v| u * 0.1 + v).unwrap();
        let text = serde_json::to_string(&FieldFile::new("nu", &f)).unwrap();
        let back: FieldFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.quantity, "nu");
        assert_eq!(back.field().unwrap(), f);
    }

    #[test]
    fn csv_lists_nodes_with_u_fastest() {
        let g = Grid2D::new(0.0, 2.0, 3, 0.0, 1.0, 3).unwrap();
        let f = ScalarField::from_fn(g, |u, _| u).unwrap();
        let csv = field_csv(&f);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "u,v,value");
        assert_eq!(lines[2], "1,0,1");
        assert_eq!(lines[4], "0,0.5,0");
        assert_eq!(lines.len(), 10);
    }

    #[test]
    fn malformed_grid_is_rejected() {
        let text = r#"{"quantity":"nu","grid":{"u_min":0,"u_max":1,"v_min":0,"v_max":1,"nu":2,"nv":3},"values":[1,1,1,1,1,1]}"#;
        assert!(serde_json::from_str::<FieldFile>(text).is_err());
    }
}
