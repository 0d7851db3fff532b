//! Independent reference computations used by the validation suites. None
//! of these share code with the kernel paths they check.

use crate::levelset::rng::SplitMix64;
use crate::mesh::{newell_normal, Box3, PolyCell};
use crate::Vec3;

/// Volume of `cell` intersected with the half space `<x - base, n> <= 0`,
/// by Sutherland-Hodgman clipping of every face polygon.
///
/// The reference point of the divergence sum is placed on the plane, so the
/// planar patch of the boundary contributes nothing and only the clipped
/// face polygons matter.
pub fn halfspace_clip_volume(cell: &PolyCell, base: Vec3, normal: Vec3) -> f64 {
    let n = normal.normalize();
    let mut acc = 0.0;
    for face in &cell.faces {
        let pts: Vec<Vec3> = face.iter().map(|&i| cell.vertices[i as usize]).collect();
        let clipped = clip_polygon_halfspace(&pts, base, n);
        if clipped.len() < 3 {
            continue;
        }
        let area_vec = newell_normal(&clipped);
        acc += (clipped[0] - base).dot(area_vec);
    }
    acc / 3.0
}

/// One Sutherland-Hodgman pass of a polygon against `<x - base, n> <= 0`.
pub fn clip_polygon_halfspace(points: &[Vec3], base: Vec3, n: Vec3) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(points.len() + 2);
    let d = |p: Vec3| (p - base).dot(n);
    for i in 0..points.len() {
        let a = points[i];
        let b = points[(i + 1) % points.len()];
        let (da, db) = (d(a), d(b));
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            out.push(a + (b - a) * (da / (da - db)));
        }
    }
    out
}

/// Stratified Monte-Carlo estimate of the volume of the member set inside
/// the box: returns `(estimate, sigma)` with the plain binomial standard
/// error of an unstratified estimator with the same sample count (an upper
/// bound for the stratified one).
pub fn monte_carlo_volume(
    bbox: Box3,
    samples: usize,
    rng: &mut SplitMix64,
    member: impl Fn(Vec3) -> bool,
) -> (f64, f64) {
    let strata = 8usize;
    let per = (samples / (strata * strata * strata)).max(1);
    let total = per * strata * strata * strata;
    let ext = bbox.extent();
    let mut hits = 0usize;
    for ix in 0..strata {
        for iy in 0..strata {
            for iz in 0..strata {
                for _ in 0..per {
                    let x = bbox.lo.x + ext.x * ((ix as f64 + rng.next_open01()) / strata as f64);
                    let y = bbox.lo.y + ext.y * ((iy as f64 + rng.next_open01()) / strata as f64);
                    let z = bbox.lo.z + ext.z * ((iz as f64 + rng.next_open01()) / strata as f64);
                    if member(Vec3::new(x, y, z)) {
                        hits += 1;
                    }
                }
            }
        }
    }
    let p = hits as f64 / total as f64;
    let vol = bbox.volume();
    (
        vol * p,
        vol * (p * (1.0 - p) / total as f64).sqrt(),
    )
}

/// Membership test for the axis-aligned table polyhedron in its local
/// `[0,1]^3` coordinates.
pub fn table_membership(a: f64, p: Vec3) -> bool {
    if !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y) || !(0.0..=1.0).contains(&p.z) {
        return false;
    }
    let b = 1.0 - a;
    if p.z >= b {
        return true; // plate
    }
    let corner = |l: f64| l <= a;
    let cx = corner(p.x) || p.x >= b;
    let cy = corner(p.y) || p.y >= b;
    cx && cy
}
