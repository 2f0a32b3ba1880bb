use bonnet_core::mesh::{obj_from_nodes, obj_string};
use bonnet_core::Grid2D;

use super::hyper::slice;
use crate::config::ExportArgs;
use crate::hyperfile::HyperFile;
use crate::output::{load_json, load_surface, write_text};
use crate::CliError;

/// Nodes per side of a hypersurface slice without a stored chart.
const SLICE_NODES: usize = 41;

pub fn run(a: &ExportArgs) -> Result<bool, CliError> {
    let value: serde_json::Value = load_json(&a.input)?;
    let obj = if value.get("kind").is_some() {
        let hf: HyperFile = serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", a.input.display())))?;
        let map = hf.map()?;
        let grid = match &hf.chart {
            Some(c) => c.grid,
            None => {
                let [u0, u1, v0, v1] = hf.domain;
                Grid2D::new(u0, u1, SLICE_NODES, v0, v1, SLICE_NODES)?
            }
        };
        let points = slice(map.as_ref(), &grid, a.w);
        let nodes: Vec<&[f64]> = points.iter().map(|x| x.as_slice()).collect();
        obj_from_nodes(grid.nu(), grid.nv(), &nodes, a.projection)?
    } else {
        let surface = load_surface(&a.input)?.surface()?;
        obj_string(surface.l(), a.projection)?
    };
    write_text(&a.out, &obj)?;
    println!("wrote {}", a.out.display());
    Ok(true)
}
