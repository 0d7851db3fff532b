//! Per-cell construction of the osculating paraboloid from a level-set
//! oracle: edge-root detection on the true field, base-point projection and
//! the Weingarten-map extraction of the principal frame.

use crate::clip::ParaboloidFrame;
use crate::levelset::LevelSetField;
use crate::math::{hermite_cubic, newton_root, plane_fit, solve_quadratic, sym2_eigen};
use crate::mesh::PolyCell;
use crate::Vec3;
use thiserror::Error;

/// Absolute level-set magnitude accepted as "on the surface".
pub const ZERO_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("projection failed to converge after {0} iterations")]
    ProjectionStalled(usize),
    #[error("degenerate surface point (vanishing gradient)")]
    DegenerateGradient,
    #[error("cell is not intersected (no edge sign change)")]
    NotIntersected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceCellStatus {
    Interior,
    Exterior,
    Intersected,
}

/// Classify a cell from the level-set sign at its vertices. Exact zeros are
/// displaced to the interior side before the sign test.
pub fn classify_cell(cell: &PolyCell, field: &dyn LevelSetField) -> SurfaceCellStatus {
    let diameter = cell.diameter();
    let mut any_neg = false;
    let mut any_pos = false;
    for &v in &cell.vertices {
        let l = nudged_value(field, v, diameter);
        if l < 0.0 {
            any_neg = true;
        } else {
            any_pos = true;
        }
    }
    match (any_neg, any_pos) {
        (true, false) => SurfaceCellStatus::Interior,
        (false, true) => SurfaceCellStatus::Exterior,
        _ => SurfaceCellStatus::Intersected,
    }
}

/// Classification from precomputed vertex values (mesh-level runs cache one
/// value per mesh vertex). Exact zeros count as interior, consistent with
/// the interior-side nudge.
pub fn classify_from_values(values: &[f64]) -> SurfaceCellStatus {
    let any_neg = values.iter().any(|&l| l <= 0.0);
    let any_pos = values.iter().any(|&l| l > 0.0);
    match (any_neg, any_pos) {
        (true, false) => SurfaceCellStatus::Interior,
        (false, true) => SurfaceCellStatus::Exterior,
        _ => SurfaceCellStatus::Intersected,
    }
}

pub fn nudged_value(field: &dyn LevelSetField, x: Vec3, diameter: f64) -> f64 {
    let l = field.value(x);
    if l != 0.0 {
        return l;
    }
    let g = field.gradient(x).norm();
    -(1e-14 * diameter * g).max(f64::MIN_POSITIVE)
}

/// Surface points on the sign-changing edges of a cell.
///
/// Along each such edge the level set is modeled by the cubic Hermite
/// interpolant of the endpoint values and directional gradients; its
/// bracketed root seeds a Newton iteration on the true field restricted to
/// the edge.
pub fn edge_surface_roots(cell: &PolyCell, field: &dyn LevelSetField) -> Vec<Vec3> {
    let mut out = Vec::new();
    for (ia, ib) in cell.unique_edges() {
        let p0 = cell.vertices[ia as usize];
        let p1 = cell.vertices[ib as usize];
        if let Some(x) = edge_root(p0, p1, field) {
            out.push(x);
        }
    }
    out
}

/// Root on one edge, or `None` when the level set admits no sign change.
/// Exact-zero endpoint values count as interior (same nudge as the cell
/// classification), so an edge from an on-surface vertex to an exterior one
/// still crosses.
pub fn edge_root(p0: Vec3, p1: Vec3, field: &dyn LevelSetField) -> Option<Vec3> {
    let mut l0 = field.value(p0);
    let mut l1 = field.value(p1);
    if l0 == 0.0 {
        l0 = -f64::MIN_POSITIVE;
    }
    if l1 == 0.0 {
        l1 = -f64::MIN_POSITIVE;
    }
    if !(l0 * l1 < 0.0) {
        return None;
    }
    let d = p1 - p0;
    let g0 = field.gradient(p0).dot(d);
    let g1 = field.gradient(p1).dot(d);
    let scale = l0.abs().max(l1.abs());
    // root of the Hermite cubic as the seed
    let seed = newton_root(
        |v| hermite_cubic(l0, l1, g0, g1, v),
        0.0,
        1.0,
        1e-13 * scale,
    )
    .unwrap_or_else(|_| l0 / (l0 - l1));
    // polish on the true field restricted to the edge
    let f = |v: f64| (field.value(p0 + d * v), field.gradient(p0 + d * v).dot(d));
    let mut v = seed.clamp(0.0, 1.0);
    let mut refined = false;
    for _ in 0..60 {
        let (fv, dfv) = f(v);
        if fv.abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            refined = true;
            break;
        }
        if dfv != 0.0 {
            let step = fv / dfv;
            let vn = v - step;
            if vn >= 0.0 && vn <= 1.0 {
                v = vn;
                continue;
            }
        }
        break;
    }
    if !refined {
        // fall back to the bracketed safeguard on the true field
        if let Ok(r) = newton_root(f, 0.0, 1.0, 1e-13 * scale) {
            v = r;
        }
    }
    Some(p0 + d * v)
}

/// Project a point onto the surface along a fixed direction.
///
/// Each update solves the quadratic model
/// `lambda + <grad, N> s + <N, H N> s^2 / 2 = 0` and takes the real root
/// smallest in magnitude, falling back to the plain Newton step when the
/// quadratic degenerates. Stops at `|lambda| <= 1e-14`.
pub fn project_to_surface(
    y0: Vec3,
    direction: Vec3,
    field: &dyn LevelSetField,
) -> Result<Vec3, SurfaceError> {
    let n = direction.normalize();
    let mut y = y0;
    for _ in 0..50 {
        let l = field.value(y);
        if l.abs() <= ZERO_TOLERANCE {
            return Ok(y);
        }
        let g = field.gradient(y).dot(n);
        let h = n.dot(field.hessian(y).mul_vec(n));
        let step = quadratic_update(l, g, h);
        y = y + n * step;
    }
    Err(SurfaceError::ProjectionStalled(50))
}

fn quadratic_update(l: f64, g: f64, h: f64) -> f64 {
    let scale = l.abs().max(g.abs()).max(h.abs());
    if h.abs() > 1e-12 * scale {
        if let Ok(roots) = solve_quadratic(0.5 * h, g, l) {
            if let Some(&s) = roots
                .iter()
                .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            {
                return s;
            }
        }
    }
    // linear fallback (also used when the discriminant is negative)
    -l / g
}

/// Principal frame at a surface point from the Weingarten map of the level
/// set: shape operator `S = -(t^T H t) / |grad|` over an orthonormal tangent
/// pair, eigen-decomposed into principal curvatures (descending) and
/// tangents. A sphere of radius `R` with the interior inside yields
/// `kappa1 = kappa2 = -1/R`.
pub fn weingarten_frame(
    field: &dyn LevelSetField,
    point: Vec3,
) -> Result<ParaboloidFrame, SurfaceError> {
    let grad = field.gradient(point);
    let gn = grad.norm();
    if gn <= 1e-12 {
        return Err(SurfaceError::DegenerateGradient);
    }
    let normal = grad / gn;
    let t1 = normal.any_orthonormal();
    let t2 = normal.cross(t1);
    let hess = field.hessian(point);
    let s11 = -t1.dot(hess.mul_vec(t1)) / gn;
    let s12 = -t1.dot(hess.mul_vec(t2)) / gn;
    let s22 = -t2.dot(hess.mul_vec(t2)) / gn;
    let (k1, k2, psi) = sym2_eigen(s11, s12, s22);
    let (c, s) = (psi.cos(), psi.sin());
    let tau1 = t1 * c + t2 * s;
    let tau2 = t1 * (-s) + t2 * c;
    Ok(ParaboloidFrame::from_parts(point, normal, tau1, tau2, k1, k2))
}

/// Full per-cell pipeline: edge roots on the true field, mean, plane-fit
/// normal (sign-aligned with the gradient), projection to the surface, and
/// the Weingarten frame at the base point.
pub fn approximate_cell_surface(
    cell: &PolyCell,
    field: &dyn LevelSetField,
) -> Result<ParaboloidFrame, SurfaceError> {
    let roots = edge_surface_roots(cell, field);
    if roots.is_empty() {
        return Err(SurfaceError::NotIntersected);
    }
    let mut mean = Vec3::zero();
    for &r in &roots {
        mean += r;
    }
    mean = mean / roots.len() as f64;

    let grad_dir = field.gradient(mean);
    let direction = if roots.len() >= 3 {
        match plane_fit(&roots) {
            Ok((_, n)) => {
                if n.dot(grad_dir) >= 0.0 {
                    n
                } else {
                    -n
                }
            }
            Err(_) => grad_dir.normalize(),
        }
    } else {
        grad_dir.normalize()
    };

    let base = project_to_surface(mean, direction, field)?;
    weingarten_frame(field, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::{LevelSetField, SphereField};
    use crate::mesh::{build_cube_mesh, Box3};
    use crate::{Mat3, Vec3};

    struct PlaneField {
        normal: Vec3,
        offset: f64,
    }

    impl LevelSetField for PlaneField {
        fn value(&self, x: Vec3) -> f64 {
            x.dot(self.normal) - self.offset
        }
        fn gradient(&self, _x: Vec3) -> Vec3 {
            self.normal
        }
        fn hessian(&self, _x: Vec3) -> Mat3 {
            Mat3::zero()
        }
    }

    /// Distance to the z axis minus R: a cylinder.
    struct CylinderField {
        radius: f64,
    }

    impl LevelSetField for CylinderField {
        fn value(&self, x: Vec3) -> f64 {
            (x.x * x.x + x.y * x.y).sqrt() - self.radius
        }
        fn gradient(&self, x: Vec3) -> Vec3 {
            let r = (x.x * x.x + x.y * x.y).sqrt();
            Vec3::new(x.x / r, x.y / r, 0.0)
        }
        fn hessian(&self, x: Vec3) -> Mat3 {
            let r2 = x.x * x.x + x.y * x.y;
            let r3 = r2 * r2.sqrt();
            let mut h = Mat3::zero();
            h.m[0][0] = x.y * x.y / r3;
            h.m[0][1] = -x.x * x.y / r3;
            h.m[1][0] = h.m[0][1];
            h.m[1][1] = x.x * x.x / r3;
            h
        }
    }

    fn cell_at(center: Vec3, h: f64) -> crate::mesh::PolyCell {
        let half = Vec3::new(h / 2.0, h / 2.0, h / 2.0);
        build_cube_mesh(1, Box3::new(center - half, center + half)).cell(0)
    }

    #[test]
    fn classification_against_sphere() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        assert_eq!(
            classify_cell(&cell_at(Vec3::new(0.95, 0.95, 0.95), 0.1), &sphere),
            SurfaceCellStatus::Exterior
        );
        assert_eq!(
            classify_cell(&cell_at(Vec3::zero(), 0.1), &sphere),
            SurfaceCellStatus::Interior
        );
        assert_eq!(
            classify_cell(&cell_at(Vec3::new(0.8, 0.0, 0.0), 0.1), &sphere),
            SurfaceCellStatus::Intersected
        );
    }

    #[test]
    fn edge_root_linear_field() {
        let plane = PlaneField {
            normal: Vec3::new(1.0, 0.0, 0.0),
            offset: 0.5,
        };
        let r = edge_root(Vec3::zero(), Vec3::new(1.0, 0.0, 0.0), &plane).unwrap();
        assert!((r - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn edge_root_radial_sphere() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let r = edge_root(Vec3::zero(), Vec3::new(1.0, 0.0, 0.0), &sphere).unwrap();
        assert!((r - Vec3::new(0.8, 0.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn edge_root_off_axis_lands_on_circle() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let r = edge_root(
            Vec3::new(0.7, 0.3, 0.0),
            Vec3::new(0.9, 0.3, 0.0),
            &sphere,
        )
        .unwrap();
        assert!((r.x * r.x + r.y * r.y - 0.64).abs() < 1e-12);
        assert!((r.y - 0.3).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let p = project_to_surface(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), &sphere)
            .unwrap();
        assert!((p - Vec3::new(0.8, 0.0, 0.0)).norm() < 1e-13);

        let on = Vec3::new(0.0, 0.8, 0.0);
        let q = project_to_surface(on, Vec3::new(0.0, 1.0, 0.0), &sphere).unwrap();
        assert_eq!(q, on);

        let plane = PlaneField {
            normal: Vec3::new(0.0, 0.0, 1.0),
            offset: 0.3,
        };
        let r = project_to_surface(Vec3::new(0.1, 0.2, 0.0), Vec3::new(0.0, 0.0, 1.0), &plane)
            .unwrap();
        assert!((r - Vec3::new(0.1, 0.2, 0.3)).norm() < 1e-14);
    }

    #[test]
    fn weingarten_on_sphere_plane_cylinder() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let f = weingarten_frame(&sphere, Vec3::new(0.8, 0.0, 0.0)).unwrap();
        assert!((f.normal - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-14);
        assert!((f.kappa1 + 1.25).abs() < 1e-12);
        assert!((f.kappa2 + 1.25).abs() < 1e-12);

        let plane = PlaneField {
            normal: Vec3::new(0.0, 0.0, 1.0),
            offset: 0.0,
        };
        let f = weingarten_frame(&plane, Vec3::zero()).unwrap();
        assert_eq!(f.kappa1, 0.0);
        assert_eq!(f.kappa2, 0.0);
        assert!((f.normal - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);

        let cyl = CylinderField { radius: 0.6 };
        let f = weingarten_frame(&cyl, Vec3::new(0.6, 0.0, 0.0)).unwrap();
        assert!(f.kappa1.abs() < 1e-13, "flat direction first");
        assert!((f.kappa2 + 1.0 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn frame_orthonormal_and_on_surface() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let cell = cell_at(Vec3::new(0.55, 0.55, 0.2), 0.12);
        assert_eq!(classify_cell(&cell, &sphere), SurfaceCellStatus::Intersected);
        let f = approximate_cell_surface(&cell, &sphere).unwrap();
        assert!(sphere.value(f.base).abs() <= ZERO_TOLERANCE);
        assert!((f.tau1.cross(f.tau2) - f.normal).norm() < 1e-12);
        assert!((f.kappa1 + 1.25).abs() < 1e-9);
        assert!((f.kappa2 + 1.25).abs() < 1e-9);
    }

    #[test]
    fn symmetric_cell_base_point_on_axis() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let cell = cell_at(Vec3::new(0.8, 0.0, 0.0), 0.1);
        let f = approximate_cell_surface(&cell, &sphere).unwrap();
        assert!((f.base.y).abs() < 1e-12 && (f.base.z).abs() < 1e-12);
        assert!((f.base.x - 0.8).abs() < 1e-12);
        assert!((f.normal - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn plane_field_gives_exact_plane_frame() {
        let plane = PlaneField {
            normal: Vec3::new(1.0, 1.0, 1.0).normalize(),
            offset: 0.2,
        };
        let cell = cell_at(Vec3::new(0.1, 0.1, 0.1), 0.3);
        let f = approximate_cell_surface(&cell, &plane).unwrap();
        assert!(plane.value(f.base).abs() <= ZERO_TOLERANCE);
        assert_eq!(f.kappa1, 0.0);
        assert_eq!(f.kappa2, 0.0);
    }

    #[test]
    fn approximation_is_rigid_equivariant() {
        // Compare through reconstructed level-set values of the paraboloid,
        // which ignores the tangent-pair ambiguity at umbilic points.
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let cell = cell_at(Vec3::new(0.55, 0.55, 0.2), 0.12);
        let frame = approximate_cell_surface(&cell, &sphere).unwrap();

        let axis = Vec3::new(0.3, -1.0, 0.7).normalize();
        let angle: f64 = 1.1;
        let shift = Vec3::new(0.4, -0.2, 0.9);
        let (sn, cs) = angle.sin_cos();
        let rot = move |p: Vec3| p * cs + axis.cross(p) * sn + axis * (axis.dot(p) * (1.0 - cs));
        let motion = move |p: Vec3| rot(p) + shift;

        let moved_sphere = SphereField::new(motion(Vec3::zero()), 0.8);
        let moved_cell = crate::mesh::PolyCell {
            vertices: cell.vertices.iter().map(|&v| motion(v)).collect(),
            faces: cell.faces.clone(),
        };
        let moved_frame = approximate_cell_surface(&moved_cell, &moved_sphere).unwrap();

        // frame transported by the motion
        let transported = ParaboloidFrame::from_parts(
            motion(frame.base),
            rot(frame.normal),
            rot(frame.tau1),
            rot(frame.tau2),
            frame.kappa1,
            frame.kappa2,
        );
        let mut rng = crate::levelset::rng::SplitMix64::new(17);
        for _ in 0..50 {
            let x = Vec3::new(
                0.55 + rng.next_range(-0.1, 0.1),
                0.55 + rng.next_range(-0.1, 0.1),
                0.2 + rng.next_range(-0.1, 0.1),
            );
            let xm = motion(x);
            let a = transported.value(xm);
            let b = moved_frame.value(xm);
            assert!((a - b).abs() < 1e-9, "reconstructed level sets differ: {a} vs {b}");
        }
    }

    #[test]
    fn fewer_than_three_roots_falls_back_to_gradient_normal() {
        // Every vertex of a sound polyhedron has degree >= 3, so a sign
        // change produces at least three crossing edges; the fallback guards
        // against degenerate cells. Drive it with a collapsed sliver whose
        // duplicate vertex leaves only two distinct crossing edges.
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let out = Vec3::new(0.82, 0.0, 0.0);
        let cell = crate::mesh::PolyCell {
            vertices: vec![Vec3::new(0.79, 0.0, 0.0), out, out],
            faces: vec![vec![0, 1, 2], vec![0, 2, 1]],
        };
        let roots = edge_surface_roots(&cell, &sphere);
        assert!(
            roots.len() == 2,
            "degenerate sliver should yield 2 roots, got {}",
            roots.len()
        );
        let f = approximate_cell_surface(&cell, &sphere).unwrap();
        assert!(sphere.value(f.base).abs() <= ZERO_TOLERANCE);
        assert!((f.kappa1 + 1.25).abs() < 1e-9);
    }
}
