//! Built-in mesh generators: equidistant cube grids, their Kuhn tetrahedral
//! subdivision, and the non-convex table polyhedron.

use super::{Box3, LegacyCell, PolyCell, PolyMesh};
use crate::Vec3;
use std::collections::HashMap;

/// Deduplicating face store: the first cell to insert a cycle owns its
/// orientation, the neighbor gets the reversed flag.
#[derive(Default)]
struct FaceStore {
    faces: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
}

impl FaceStore {
    fn insert(&mut self, cycle: Vec<u32>) -> (u32, bool) {
        let mut key = cycle.clone();
        key.sort_unstable();
        match self.index.get(&key) {
            Some(&f) => (f, true),
            None => {
                let f = self.faces.len() as u32;
                self.faces.push(cycle);
                self.index.insert(key, f);
                (f, false)
            }
        }
    }
}

/// `N^3` hexahedral cells over the box.
pub fn build_cube_mesh(n: usize, domain: Box3) -> PolyMesh {
    assert!(n >= 1);
    let np = n + 1;
    let ext = domain.extent();
    let mut vertices = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                vertices.push(Vec3::new(
                    domain.lo.x + ext.x * i as f64 / n as f64,
                    domain.lo.y + ext.y * j as f64 / n as f64,
                    domain.lo.z + ext.z * k as f64 / n as f64,
                ));
            }
        }
    }
    let vid = |i: usize, j: usize, k: usize| (i + np * (j + np * k)) as u32;

    let mut store = FaceStore::default();
    let mut cells = Vec::with_capacity(n * n * n);
    let mut legacy = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = [
                    vid(i, j, k),
                    vid(i + 1, j, k),
                    vid(i, j + 1, k),
                    vid(i + 1, j + 1, k),
                    vid(i, j, k + 1),
                    vid(i + 1, j, k + 1),
                    vid(i, j + 1, k + 1),
                    vid(i + 1, j + 1, k + 1),
                ];
                // indices into c: bit 0 = +x, bit 1 = +y, bit 2 = +z
                let quads: [[usize; 4]; 6] = [
                    [0, 4, 6, 2], // -x
                    [1, 3, 7, 5], // +x
                    [0, 1, 5, 4], // -y
                    [2, 6, 7, 3], // +y
                    [0, 2, 3, 1], // -z
                    [4, 5, 7, 6], // +z
                ];
                let cell = quads
                    .iter()
                    .map(|q| store.insert(q.iter().map(|&b| c[b]).collect()))
                    .collect();
                cells.push(cell);
                legacy.push(LegacyCell {
                    cell_type: 12,
                    nodes: vec![c[0], c[1], c[3], c[2], c[4], c[5], c[7], c[6]],
                });
            }
        }
    }
    PolyMesh {
        vertices,
        faces: store.faces,
        cells,
        legacy: Some(legacy),
    }
}

/// Kuhn subdivision: every cube of the `N^3` grid split into six tetrahedra
/// sharing the main diagonal.
pub fn build_tet_mesh(n: usize, domain: Box3) -> PolyMesh {
    assert!(n >= 1);
    let np = n + 1;
    let ext = domain.extent();
    let mut vertices = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                vertices.push(Vec3::new(
                    domain.lo.x + ext.x * i as f64 / n as f64,
                    domain.lo.y + ext.y * j as f64 / n as f64,
                    domain.lo.z + ext.z * k as f64 / n as f64,
                ));
            }
        }
    }
    let vid = |i: usize, j: usize, k: usize| (i + np * (j + np * k)) as u32;

    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut store = FaceStore::default();
    let mut cells = Vec::with_capacity(6 * n * n * n);
    let mut legacy = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let corner = |bits: usize| {
                    vid(i + (bits & 1), j + ((bits >> 1) & 1), k + ((bits >> 2) & 1))
                };
                for perm in PERMS {
                    let b1 = 1usize << perm[0];
                    let b2 = b1 | (1usize << perm[1]);
                    let mut tet = [corner(0), corner(b1), corner(b2), corner(7)];
                    orient_tet(&vertices, &mut tet);
                    let tris: [[usize; 3]; 4] =
                        [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
                    let cell = tris
                        .iter()
                        .map(|t| store.insert(t.iter().map(|&b| tet[b]).collect()))
                        .collect();
                    cells.push(cell);
                    legacy.push(LegacyCell {
                        cell_type: 10,
                        nodes: tet.to_vec(),
                    });
                }
            }
        }
    }
    PolyMesh {
        vertices,
        faces: store.faces,
        cells,
        legacy: Some(legacy),
    }
}

/// Reorder so the tetrahedron is positively oriented.
fn orient_tet(vertices: &[Vec3], tet: &mut [u32; 4]) {
    let p = |i: u32| vertices[i as usize];
    let d = (p(tet[1]) - p(tet[0]))
        .cross(p(tet[2]) - p(tet[0]))
        .dot(p(tet[3]) - p(tet[0]));
    if d < 0.0 {
        tet.swap(1, 2);
    }
}

/// Table-shaped polyhedron in local coordinates `[0,1]^3`: a plate of size
/// `1 x 1 x a` on top of four legs `a x a x (1-a)` at the footprint corners.
/// The underside of the plate is a non-convex 12-gon.
pub fn build_table_polyhedron(a: f64) -> PolyCell {
    assert!(a > 0.0 && a < 0.5, "table parameter must be in (0, 1/2)");
    let b = 1.0 - a; // top of the legs / bottom of the plate
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<Vec<u32>> = Vec::new();
    let vid = |v: Vec3, vertices: &mut Vec<Vec3>| -> u32 {
        for (i, &w) in vertices.iter().enumerate() {
            if (w - v).norm() < 1e-14 {
                return i as u32;
            }
        }
        vertices.push(v);
        (vertices.len() - 1) as u32
    };
    let push_face = |pts: &[Vec3], vertices: &mut Vec<Vec3>, faces: &mut Vec<Vec<u32>>| {
        faces.push(pts.iter().map(|&p| vid(p, vertices)).collect());
    };

    let p = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);

    // plate top, z = 1, outward +z
    push_face(
        &[p(0., 0., 1.), p(1., 0., 1.), p(1., 1., 1.), p(0., 1., 1.)],
        &mut vertices,
        &mut faces,
    );
    // plate sides over z in [b, 1]
    push_face(
        &[p(0., 0., b), p(1., 0., b), p(1., 0., 1.), p(0., 0., 1.)],
        &mut vertices,
        &mut faces,
    ); // y = 0, -y
    push_face(
        &[p(1., 0., b), p(1., 1., b), p(1., 1., 1.), p(1., 0., 1.)],
        &mut vertices,
        &mut faces,
    ); // x = 1, +x
    push_face(
        &[p(1., 1., b), p(0., 1., b), p(0., 1., 1.), p(1., 1., 1.)],
        &mut vertices,
        &mut faces,
    ); // y = 1, +y
    push_face(
        &[p(0., 1., b), p(0., 0., b), p(0., 0., 1.), p(0., 1., 1.)],
        &mut vertices,
        &mut faces,
    ); // x = 0, -x

    // plate underside at z = b: the square minus the four leg tops, a
    // non-convex 12-gon, outward -z (clockwise in the xy view).
    let ring = [
        (a, 0.),
        (1. - a, 0.),
        (1. - a, a),
        (1., a),
        (1., 1. - a),
        (1. - a, 1. - a),
        (1. - a, 1.),
        (a, 1.),
        (a, 1. - a),
        (0., 1. - a),
        (0., a),
        (a, a),
    ];
    let underside: Vec<Vec3> = ring.iter().rev().map(|&(x, y)| p(x, y, b)).collect();
    push_face(&underside, &mut vertices, &mut faces);

    // legs: bottoms and sides over z in [0, b]
    for (lx, ly) in [(0., 0.), (1. - a, 0.), (1. - a, 1. - a), (0., 1. - a)] {
        let (hx, hy) = (lx + a, ly + a);
        push_face(
            &[p(lx, ly, 0.), p(lx, hy, 0.), p(hx, hy, 0.), p(hx, ly, 0.)],
            &mut vertices,
            &mut faces,
        ); // bottom, -z
        push_face(
            &[p(lx, ly, 0.), p(hx, ly, 0.), p(hx, ly, b), p(lx, ly, b)],
            &mut vertices,
            &mut faces,
        ); // -y
        push_face(
            &[p(hx, ly, 0.), p(hx, hy, 0.), p(hx, hy, b), p(hx, ly, b)],
            &mut vertices,
            &mut faces,
        ); // +x
        push_face(
            &[p(hx, hy, 0.), p(lx, hy, 0.), p(lx, hy, b), p(hx, hy, b)],
            &mut vertices,
            &mut faces,
        ); // +y
        push_face(
            &[p(lx, hy, 0.), p(lx, ly, 0.), p(lx, ly, b), p(lx, hy, b)],
            &mut vertices,
            &mut faces,
        ); // -x
    }

    PolyCell { vertices, faces }
}
