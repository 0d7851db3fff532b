//! Legacy (ASCII) VTK unstructured-grid reader and a cell-scalar writer.
//! Supports tetrahedra (type 10) and hexahedra (type 12).

use super::{LegacyCell, MeshError, PolyMesh};
use crate::Vec3;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

struct Tokens {
    words: Vec<(usize, String)>, // (line number, token)
    pos: usize,
}

impl Tokens {
    fn next(&mut self) -> Result<(usize, &str), MeshError> {
        let t = self.words.get(self.pos).ok_or(MeshError::VtkParse {
            line: self.words.last().map(|w| w.0).unwrap_or(0),
            message: "unexpected end of file".into(),
        })?;
        self.pos += 1;
        Ok((t.0, t.1.as_str()))
    }

    fn expect(&mut self, word: &str) -> Result<(), MeshError> {
        let (line, t) = self.next()?;
        if !t.eq_ignore_ascii_case(word) {
            return Err(MeshError::VtkParse {
                line,
                message: format!("expected `{word}`, found `{t}`"),
            });
        }
        Ok(())
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T, MeshError> {
        let (line, t) = self.next()?;
        t.parse().map_err(|_| MeshError::VtkParse {
            line,
            message: format!("expected a number, found `{t}`"),
        })
    }
}

pub fn read_vtk_legacy(path: impl AsRef<Path>) -> Result<PolyMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_vtk_legacy(&text)
}

pub fn parse_vtk_legacy(text: &str) -> Result<PolyMesh, MeshError> {
    let mut lines = text.lines().enumerate();

    // header: `# vtk DataFile Version x.y`
    let (hline, header) = lines.next().ok_or(MeshError::VtkParse {
        line: 1,
        message: "empty file".into(),
    })?;
    let h = header.trim();
    if !(h.starts_with("# vtk DataFile Version") || h.starts_with("# vtk DataFile version")) {
        return Err(MeshError::VtkParse {
            line: hline + 1,
            message: format!("malformed header `{h}`"),
        });
    }
    lines.next(); // title, free text
    let (fline, format) = lines.next().ok_or(MeshError::VtkParse {
        line: hline + 3,
        message: "missing format line".into(),
    })?;
    if !format.trim().eq_ignore_ascii_case("ASCII") {
        return Err(MeshError::VtkParse {
            line: fline + 1,
            message: format!("only ASCII files are supported, found `{}`", format.trim()),
        });
    }

    let mut words = Vec::new();
    for (ln, line) in lines {
        for w in line.split_whitespace() {
            words.push((ln + 1, w.to_string()));
        }
    }
    let mut tk = Tokens { words, pos: 0 };

    tk.expect("DATASET")?;
    tk.expect("UNSTRUCTURED_GRID")?;
    tk.expect("POINTS")?;
    let n_points: usize = tk.number()?;
    let _dtype = tk.next()?.1.to_string();
    let mut vertices = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let x: f64 = tk.number()?;
        let y: f64 = tk.number()?;
        let z: f64 = tk.number()?;
        vertices.push(Vec3::new(x, y, z));
    }

    tk.expect("CELLS")?;
    let n_cells: usize = tk.number()?;
    let _list_size: usize = tk.number()?;
    let mut conn = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let count: usize = tk.number()?;
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            nodes.push(tk.number::<u32>()?);
        }
        conn.push(nodes);
    }

    tk.expect("CELL_TYPES")?;
    let n_types: usize = tk.number()?;
    if n_types != n_cells {
        return Err(MeshError::VtkParse {
            line: 0,
            message: format!("CELL_TYPES count {n_types} does not match CELLS {n_cells}"),
        });
    }
    let mut mesh = PolyMesh::default();
    mesh.vertices = vertices;
    let mut store_index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut legacy = Vec::with_capacity(n_cells);
    for nodes in conn {
        let t: u8 = tk.number()?;
        let cycles: Vec<Vec<u32>> = match t {
            10 => {
                if nodes.len() != 4 {
                    return Err(MeshError::VtkParse {
                        line: 0,
                        message: format!("tetra with {} nodes", nodes.len()),
                    });
                }
                let mut tet = [nodes[0], nodes[1], nodes[2], nodes[3]];
                // positively orient, then take the outward triangles
                let p = |i: u32| mesh.vertices[i as usize];
                let d = (p(tet[1]) - p(tet[0]))
                    .cross(p(tet[2]) - p(tet[0]))
                    .dot(p(tet[3]) - p(tet[0]));
                if d < 0.0 {
                    tet.swap(1, 2);
                }
                [[0usize, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]
                    .iter()
                    .map(|tri| tri.iter().map(|&i| tet[i]).collect())
                    .collect()
            }
            12 => {
                if nodes.len() != 8 {
                    return Err(MeshError::VtkParse {
                        line: 0,
                        message: format!("hexahedron with {} nodes", nodes.len()),
                    });
                }
                [
                    [0usize, 3, 2, 1],
                    [4, 5, 6, 7],
                    [0, 1, 5, 4],
                    [1, 2, 6, 5],
                    [2, 3, 7, 6],
                    [3, 0, 4, 7],
                ]
                .iter()
                .map(|quad| quad.iter().map(|&i| nodes[i]).collect())
                .collect()
            }
            other => return Err(MeshError::UnsupportedCellType(other)),
        };
        let mut cell = Vec::with_capacity(cycles.len());
        for cycle in cycles {
            let mut key = cycle.clone();
            key.sort_unstable();
            match store_index.get(&key) {
                Some(&f) => cell.push((f, true)),
                None => {
                    let f = mesh.faces.len() as u32;
                    mesh.faces.push(cycle);
                    store_index.insert(key, f);
                    cell.push((f, false));
                }
            }
        }
        mesh.cells.push(cell);
        legacy.push(LegacyCell {
            cell_type: t,
            nodes,
        });
    }
    mesh.legacy = Some(legacy);

    // A cell with negative divergence volume means the node order was
    // inverted; flip its face orientations.
    for i in 0..mesh.n_cells() {
        if mesh.cell(i).volume() < 0.0 {
            for entry in &mut mesh.cells[i] {
                entry.1 = !entry.1;
            }
        }
    }
    Ok(mesh)
}

/// Write the mesh (tetra/hexa cells) with one scalar per cell as legacy
/// ASCII VTK.
pub fn write_vtk_cell_scalars(
    mesh: &PolyMesh,
    name: &str,
    values: &[f64],
    path: impl AsRef<Path>,
) -> Result<(), MeshError> {
    let legacy = mesh.legacy.as_ref().ok_or(MeshError::NoLegacyCells)?;
    assert_eq!(values.len(), mesh.n_cells(), "one value per cell");
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "cell scalars")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.vertices.len())?;
    for v in &mesh.vertices {
        writeln!(out, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z)?;
    }
    let list_size: usize = legacy.iter().map(|c| c.nodes.len() + 1).sum();
    writeln!(out, "CELLS {} {}", legacy.len(), list_size)?;
    for c in legacy {
        write!(out, "{}", c.nodes.len())?;
        for n in &c.nodes {
            write!(out, " {n}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", legacy.len())?;
    for c in legacy {
        writeln!(out, "{}", c.cell_type)?;
    }
    writeln!(out, "CELL_DATA {}", legacy.len())?;
    writeln!(out, "SCALARS {name} double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in values {
        writeln!(out, "{v:.17e}")?;
    }
    Ok(())
}
