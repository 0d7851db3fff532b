//! Single-cell JSON exchange format:
//! `{"vertices": [[x,y,z], ...], "faces": [[i0,i1,...], ...]}` with
//! counter-clockwise, outward-oriented face cycles.

use super::{MeshError, PolyCell};
use crate::Vec3;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct CellJson {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<u32>>,
}

pub fn cell_from_json(text: &str) -> Result<PolyCell, MeshError> {
    let raw: CellJson = serde_json::from_str(text).map_err(|e| MeshError::Json(e.to_string()))?;
    if raw.vertices.len() < 4 || raw.faces.len() < 4 {
        return Err(MeshError::Json(
            "a cell needs at least four vertices and four faces".into(),
        ));
    }
    let nv = raw.vertices.len() as u32;
    for f in &raw.faces {
        if f.len() < 3 {
            return Err(MeshError::Json("face with fewer than three vertices".into()));
        }
        if f.iter().any(|&i| i >= nv) {
            return Err(MeshError::Json("face index out of range".into()));
        }
    }
    Ok(PolyCell {
        vertices: raw
            .vertices
            .iter()
            .map(|v| Vec3::new(v[0], v[1], v[2]))
            .collect(),
        faces: raw.faces,
    })
}

pub fn cell_to_json(cell: &PolyCell) -> String {
    let raw = CellJson {
        vertices: cell.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
        faces: cell.faces.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("cell serializes")
}
