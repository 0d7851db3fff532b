//! Polyhedral mesh data model, built-in generators and VTK legacy I/O.
//!
//! Faces are stored once with a canonical vertex cycle; each cell references
//! its faces with an orientation flag so that every cell sees
//! counter-clockwise, outward-oriented cycles.

mod generate;
mod json;
mod vtk;

pub use generate::{build_cube_mesh, build_table_polyhedron, build_tet_mesh};
pub use json::{cell_from_json, cell_to_json};
pub use vtk::{read_vtk_legacy, write_vtk_cell_scalars};

use crate::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("cell not closed (residual area vector {0:e})")]
    NotClosed(f64),
    #[error("VTK parse error at line {line}: {message}")]
    VtkParse { line: usize, message: String },
    #[error("unsupported VTK cell type {0}")]
    UnsupportedCellType(u8),
    #[error("mesh carries no legacy cell description, cannot write legacy VTK")]
    NoLegacyCells,
    #[error("cell JSON: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Axis-aligned box, used as the meshing domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Box3 {
    pub fn new(lo: Vec3, hi: Vec3) -> Self {
        Self { lo, hi }
    }

    /// The domain used throughout the experiments.
    pub fn unit_symmetric() -> Self {
        Self::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0))
    }

    pub fn extent(&self) -> Vec3 {
        self.hi - self.lo
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x * e.y * e.z
    }
}

/// Legacy VTK cell record kept alongside the polyhedral view so meshes can
/// be re-emitted in the legacy format.
#[derive(Debug, Clone)]
pub struct LegacyCell {
    pub cell_type: u8,
    pub nodes: Vec<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct PolyMesh {
    pub vertices: Vec<Vec3>,
    /// Canonical vertex cycles; orientation is per cell.
    pub faces: Vec<Vec<u32>>,
    /// Per cell: (face index, reversed?) with `reversed = false` meaning the
    /// canonical cycle is already counter-clockwise w.r.t. this cell's
    /// outward normal.
    pub cells: Vec<Vec<(u32, bool)>>,
    pub legacy: Option<Vec<LegacyCell>>,
}

/// One polyhedral cell with local vertices and outward-oriented faces.
#[derive(Debug, Clone)]
pub struct PolyCell {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<u32>>,
}

impl PolyMesh {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Materialize cell `i` with locally indexed, outward-oriented faces.
    pub fn cell(&self, i: usize) -> PolyCell {
        self.cell_with_map(i).0
    }

    /// Like [`PolyMesh::cell`], also returning the local-to-global vertex
    /// index map.
    pub fn cell_with_map(&self, i: usize) -> (PolyCell, Vec<u32>) {
        let mut map: Vec<(u32, u32)> = Vec::new();
        let mut vertices = Vec::new();
        let mut global = Vec::new();
        let mut faces = Vec::new();
        for &(f, reversed) in &self.cells[i] {
            let cycle = &self.faces[f as usize];
            let mut local = Vec::with_capacity(cycle.len());
            let iter: Box<dyn Iterator<Item = &u32>> = if reversed {
                Box::new(cycle.iter().rev())
            } else {
                Box::new(cycle.iter())
            };
            for &g in iter {
                let l = match map.iter().find(|(gg, _)| *gg == g) {
                    Some(&(_, l)) => l,
                    None => {
                        let l = vertices.len() as u32;
                        vertices.push(self.vertices[g as usize]);
                        global.push(g);
                        map.push((g, l));
                        l
                    }
                };
                local.push(l);
            }
            faces.push(local);
        }
        (PolyCell { vertices, faces }, global)
    }

    /// Per-cell volumes by the divergence theorem.
    pub fn cell_volumes(&self) -> Result<Vec<f64>, MeshError> {
        (0..self.n_cells()).map(|i| self.cell(i).checked_volume()).collect()
    }
}

impl PolyCell {
    /// Divergence-theorem volume `1/3 sum <x_1 - ref, n> |F|`, reference at
    /// the first vertex.
    pub fn volume(&self) -> f64 {
        let r = self.vertices[0];
        let mut acc = 0.0;
        for face in &self.faces {
            let pts: Vec<Vec3> = face.iter().map(|&i| self.vertices[i as usize]).collect();
            let area_vec = newell_normal(&pts);
            acc += (pts[0] - r).dot(area_vec);
        }
        acc / 3.0
    }

    /// Volume with the closure check `sum over faces of n dA = 0`.
    pub fn checked_volume(&self) -> Result<f64, MeshError> {
        let mut total = Vec3::zero();
        let mut scale = 0.0;
        for face in &self.faces {
            let pts: Vec<Vec3> = face.iter().map(|&i| self.vertices[i as usize]).collect();
            let area_vec = newell_normal(&pts);
            total += area_vec;
            scale += area_vec.norm();
        }
        if total.norm() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(MeshError::NotClosed(total.norm()));
        }
        Ok(self.volume())
    }

    /// Bounding-box diagonal; the length scale for kernel tolerances.
    pub fn diameter(&self) -> f64 {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for &v in &self.vertices {
            lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (hi - lo).norm()
    }

    /// Unique undirected edges (each geometric edge of a closed cell shows
    /// up in exactly two face cycles).
    pub fn unique_edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for face in &self.faces {
            for m in 0..face.len() {
                let a = face[m];
                let b = face[(m + 1) % face.len()];
                let key = (a.min(b), a.max(b));
                if !edges.contains(&key) {
                    edges.push(key);
                }
            }
        }
        edges
    }

    pub fn face_points(&self, k: usize) -> Vec<Vec3> {
        self.faces[k].iter().map(|&i| self.vertices[i as usize]).collect()
    }
}

/// Area vector of a planar polygon (Newell's formula): direction is the
/// cycle normal, length is the area.
pub fn newell_normal(points: &[Vec3]) -> Vec3 {
    let mut n = Vec3::zero();
    for i in 0..points.len() {
        let a = points[i];
        let b = points[(i + 1) % points.len()];
        n += a.cross(b);
    }
    n * 0.5
}
