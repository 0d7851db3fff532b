//! Per-face conic: the intersection curve of the paraboloid with the plane
//! of a polyhedron face, classified in principal coordinates.
//!
//! In the in-plane coordinates `u` (orthonormal basis `mu` with
//! `mu1 x mu2 = n_f`), the curve is the zero set of
//! `Q(u) = u^T A u + avec . u + a`, and `Q = -lambda` restricted to the face
//! plane, so the immersed side is `Q > 0`. Principal coordinates
//! `u' = R (u - u0)` diagonalize `A`; the eigenvalue signs select the class
//! and an explicit parametrization.

use super::{ClipError, ParaboloidFrame};
use crate::math::{sym2_eigen, Matrix2};
use crate::{Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Linear,
    /// Second degenerate-parabolic case; handled as a flattened hyperbola.
    ParallelLines,
}

/// Explicit parametrization of the curve in principal coordinates.
#[derive(Debug, Clone, Copy)]
pub enum ConicForm {
    /// `u'(t) = (p cos t, q sin t)`
    Ellipse { p: f64, q: f64 },
    /// Left/right branches `u'(t) = (sigma p cosh t, q sinh t)`
    HyperbolaLr { p: f64, q: f64 },
    /// Up/down branches `u'(t) = (p sinh t, sigma q cosh t)`
    HyperbolaUd { p: f64, q: f64 },
    /// `u'(t) = (t, c1 t + c2 t^2)`
    Parabola { c1: f64, c2: f64 },
    /// `u(t) = point + dir t` (principal frame equals the raw frame here)
    Line { point: Vec2, dir: Vec2 },
    /// No real points (only possible without edge intersections).
    Empty,
}

#[derive(Debug, Clone)]
pub struct FaceConic {
    pub face: usize,
    pub class: ConicClass,
    /// Raw coefficients of `Q` in the `u` frame.
    pub a: f64,
    pub avec: Vec2,
    pub amat: Matrix2<f64>,
    /// In-plane basis and its anchor (first face vertex).
    pub mu1: Vec3,
    pub mu2: Vec3,
    pub anchor: Vec3,
    /// Principal transformation `u' = R (u - u0)` and reduced coefficients.
    pub psi: f64,
    pub rot: Matrix2<f64>,
    pub u0: Vec2,
    pub b: f64,
    pub bvec: Vec2,
    pub b1: f64,
    pub b2: f64,
    /// Logical status of the principal origin: +1 exterior, -1 interior.
    pub status: i8,
    /// Magnitude of `Q` over the cell (`|A| D^2 + |avec| D + |a|`), the
    /// denominator for residual checks.
    pub scale: f64,
    /// False when the principal reduction is numerically meaningless (the
    /// center sits far outside the cell); arcs are then handled through the
    /// raw-frame bisection machinery.
    pub well_conditioned: bool,
    pub form: ConicForm,
}

impl FaceConic {
    pub fn u_of_point(&self, x: Vec3) -> Vec2 {
        let d = x - self.anchor;
        Vec2::new(d.dot(self.mu1), d.dot(self.mu2))
    }

    pub fn uprime_of_u(&self, u: Vec2) -> Vec2 {
        self.rot.mul_vec(u - self.u0)
    }

    pub fn point_of_uprime(&self, up: Vec2) -> Vec3 {
        let u = self.rot.transpose().mul_vec(up) + self.u0;
        self.anchor + self.mu1 * u.x + self.mu2 * u.y
    }

    /// `Q` in the raw frame (equals `-lambda` on the face plane).
    pub fn q_value(&self, u: Vec2) -> f64 {
        u.dot(self.amat.mul_vec(u)) + u.dot(self.avec) + self.a
    }

    /// Point on the curve for a branch (`0` or `+-1` for hyperbolas) and
    /// parameter value.
    pub fn uprime(&self, branch: i8, t: f64) -> Vec2 {
        let s = branch as f64;
        match self.form {
            ConicForm::Ellipse { p, q } => Vec2::new(p * t.cos(), q * t.sin()),
            ConicForm::HyperbolaLr { p, q } => Vec2::new(s * p * t.cosh(), q * t.sinh()),
            ConicForm::HyperbolaUd { p, q } => Vec2::new(p * t.sinh(), s * q * t.cosh()),
            ConicForm::Parabola { c1, c2 } => Vec2::new(t, c1 * t + c2 * t * t),
            ConicForm::Line { point, dir } => point + dir * t,
            ConicForm::Empty => unreachable!("empty conic has no points"),
        }
    }

    pub fn duprime(&self, branch: i8, t: f64) -> Vec2 {
        let s = branch as f64;
        match self.form {
            ConicForm::Ellipse { p, q } => Vec2::new(-p * t.sin(), q * t.cos()),
            ConicForm::HyperbolaLr { p, q } => Vec2::new(s * p * t.sinh(), q * t.cosh()),
            ConicForm::HyperbolaUd { p, q } => Vec2::new(p * t.cosh(), s * q * t.sinh()),
            ConicForm::Parabola { c1, c2 } => Vec2::new(1.0, c1 + 2.0 * c2 * t),
            ConicForm::Line { dir, .. } => dir,
            ConicForm::Empty => unreachable!("empty conic has no points"),
        }
    }

    /// Branch assignment and parameter of a point known to lie on the curve.
    pub fn param_of(&self, up: Vec2) -> (i8, f64) {
        match self.form {
            ConicForm::Ellipse { p, q } => {
                let mut th = (up.y / q).atan2(up.x / p);
                if th < 0.0 {
                    th += 2.0 * std::f64::consts::PI;
                }
                (0, th)
            }
            ConicForm::HyperbolaLr { q, .. } => {
                let sigma = if up.x >= 0.0 { 1i8 } else { -1 };
                (sigma, (up.y / q).asinh())
            }
            ConicForm::HyperbolaUd { p, .. } => {
                let sigma = if up.y >= 0.0 { 1i8 } else { -1 };
                (sigma, (up.x / p).asinh())
            }
            ConicForm::Parabola { .. } => (0, up.x),
            ConicForm::Line { point, dir } => (0, (up - point).dot(dir)),
            ConicForm::Empty => unreachable!("empty conic has no points"),
        }
    }

    /// Gradient of the raw-frame `Q` (points toward the immersed side).
    pub fn grad_q_raw(&self, u: Vec2) -> Vec2 {
        self.amat.mul_vec(u) * 2.0 + self.avec
    }

    /// Does increasing curve parameter keep the immersed side (`Q > 0`) on
    /// the left at this parameter? Evaluated from raw-frame quantities,
    /// which stay well conditioned for nearly degenerate conics. `None`
    /// when tangent and gradient are too degenerate to decide.
    pub fn interior_left_increasing(&self, branch: i8, t: f64, diameter: f64) -> Option<bool> {
        let up = self.uprime(branch, t);
        let u = self.rot.transpose().mul_vec(up) + self.u0;
        let tangent_raw = self.rot.transpose().mul_vec(self.duprime(branch, t));
        let grad = self.grad_q_raw(u);
        let d = tangent_raw.rot90().dot(grad);
        let scale = (self.amat.norm() * diameter + self.avec.norm())
            * tangent_raw.norm().max(f64::MIN_POSITIVE);
        if d.abs() > 1e-12 * scale {
            Some(d > 0.0)
        } else {
            None
        }
    }

    /// Parameter of `up` relative to `up_ref` on the same branch, computed
    /// from coordinate cross products. This stays accurate when the
    /// absolute parameters of an ill-conditioned conic are pure noise.
    pub fn relative_param(&self, branch: i8, up_ref: Vec2, up: Vec2) -> f64 {
        let s = branch as f64;
        match self.form {
            ConicForm::Ellipse { p, q } => {
                let c0 = Vec2::new(up_ref.x / p, up_ref.y / q);
                let c1 = Vec2::new(up.x / p, up.y / q);
                c0.cross(c1).atan2(c0.dot(c1))
            }
            ConicForm::HyperbolaLr { p, q } => {
                (s * up_ref.cross(up) / (p * q)).asinh()
            }
            ConicForm::HyperbolaUd { p, q } => {
                (-s * up_ref.cross(up) / (p * q)).asinh()
            }
            ConicForm::Parabola { .. } => up.x - up_ref.x,
            ConicForm::Line { dir, .. } => (up - up_ref).dot(dir),
            ConicForm::Empty => 0.0,
        }
    }

    /// Antiderivative of the Green area integrand
    /// `1/2 (u1 du2 - u2 du1)` along the parametrization.
    pub fn green_antiderivative(&self, branch: i8, t: f64) -> f64 {
        let s = branch as f64;
        match self.form {
            ConicForm::Ellipse { p, q } => 0.5 * p * q * t,
            ConicForm::HyperbolaLr { p, q } => 0.5 * s * p * q * t,
            ConicForm::HyperbolaUd { p, q } => -0.5 * s * p * q * t,
            ConicForm::Parabola { c2, .. } => c2 * t * t * t / 6.0,
            ConicForm::Line { point, dir } => 0.5 * point.cross(dir) * t,
            ConicForm::Empty => 0.0,
        }
    }

    /// Residual of the raw conic equation at a point (in `u` coordinates),
    /// relative to the conic magnitude over the cell. The raw form stays
    /// well conditioned even when the principal reduction does not.
    pub fn residual(&self, u: Vec2) -> (f64, f64) {
        (self.q_value(u), self.scale.max(f64::MIN_POSITIVE))
    }
}

/// Classify the boundary curve of the paraboloid on one face.
///
/// Returns `None` when the level set is constant over the face to working
/// precision (no curve; the face is resolved by vertex status alone).
pub fn classify_face(
    face: usize,
    points: &[Vec3],
    n_f: Vec3,
    frame: &ParaboloidFrame,
    diameter: f64,
) -> Option<FaceConic> {
    let anchor = points[0];
    let mu1 = (points[1] - points[0]).normalize();
    let mu2 = n_f.cross(mu1);

    // M = tau K tau^T applied through dot products
    let k1 = 0.5 * frame.kappa1;
    let k2 = 0.5 * frame.kappa2;
    let m_apply = |v: Vec3| -> Vec3 {
        frame.tau1 * (k1 * v.dot(frame.tau1)) + frame.tau2 * (k2 * v.dot(frame.tau2))
    };
    let d1 = anchor - frame.base;
    let md1 = m_apply(d1);
    let a = d1.dot(md1 - frame.normal);
    let w = md1 * 2.0 - frame.normal;
    let avec = Vec2::new(mu1.dot(w), mu2.dot(w));
    let mmu1 = m_apply(mu1);
    let mmu2 = m_apply(mu2);
    let amat = Matrix2::new(
        mu1.dot(mmu1),
        mu1.dot(mmu2),
        mu2.dot(mmu1),
        mu2.dot(mmu2),
    );

    let norm_a = amat.norm();
    let norm_lin = avec.norm();
    let conic_scale = norm_a * diameter * diameter + norm_lin * diameter + a.abs();
    if conic_scale == 0.0
        || norm_a * diameter * diameter + norm_lin * diameter <= 1e-12 * conic_scale
    {
        return None; // trivial conic: Q effectively constant on the face
    }

    let base = FaceConic {
        face,
        class: ConicClass::Linear,
        scale: conic_scale,
        well_conditioned: true,
        a,
        avec,
        amat,
        mu1,
        mu2,
        anchor,
        psi: 0.0,
        rot: Matrix2::identity(),
        u0: Vec2::zero(),
        b: a,
        bvec: avec,
        b1: 0.0,
        b2: 0.0,
        status: -sign_of(a),
        form: ConicForm::Empty,
    };

    // Quadratic part negligible against the linear part: a line.
    if norm_a * diameter <= 1e-12 * norm_lin {
        let nd = avec.normalize();
        let point = nd * (-a / norm_lin);
        // Direction with the immersed side (Q > 0) on the left.
        let dir = Vec2::new(nd.y, -nd.x);
        return Some(FaceConic {
            form: ConicForm::Line { point, dir },
            ..base
        });
    }

    let (l1, l2, psi) = sym2_eigen(amat.m[0][0], amat.m[0][1], amat.m[1][1]);
    let det = l1 * l2;
    let floor_scale = conic_scale / (diameter * diameter).max(f64::MIN_POSITIVE);

    if det.abs() > 1e-12 * norm_a * norm_a {
        // Centered conic: u0 solves 2 A u0 = -avec.
        let u0 = solve2(amat, avec * -0.5);
        let b = a + u0.dot(avec + amat.mul_vec(u0));
        let rot = Matrix2::rotation(psi);
        let bvec = rot.mul_vec(avec + amat.mul_vec(u0) * 2.0);
        let class = if det > 0.0 {
            ConicClass::Elliptic
        } else {
            ConicClass::Hyperbolic
        };
        let conic = centered_form(FaceConic {
            class,
            psi,
            rot,
            u0,
            b,
            bvec,
            b1: l1,
            b2: l2,
            status: -sign_of(b),
            well_conditioned: u0.norm() <= 1e4 * diameter,
            ..base
        }, floor_scale);
        return Some(conic);
    }

    // Degenerate family: one vanishing eigenvalue. Put the nonzero one in
    // slot 1 (swap axes by a quarter turn if needed).
    let (big, small, psi) = if l1.abs() >= l2.abs() {
        (l1, l2, psi)
    } else {
        (l2, l1, psi + std::f64::consts::FRAC_PI_2)
    };
    let rot = Matrix2::rotation(psi);
    let r1 = rot.transpose().mul_vec(Vec2::new(1.0, 0.0));
    let r2 = rot.transpose().mul_vec(Vec2::new(0.0, 1.0));
    let alpha2 = avec.dot(r2);

    if alpha2.abs() > 1e-12 * (norm_lin + norm_a * diameter) {
        // Genuine parabola.
        let u0 = r2 * (-a / alpha2);
        let bvec = rot.mul_vec(avec + amat.mul_vec(u0) * 2.0);
        let c1 = -avec.dot(r1) / alpha2;
        let c2 = -big / alpha2;
        return Some(FaceConic {
            class: ConicClass::Parabolic,
            psi,
            rot,
            u0,
            b: 0.0,
            bvec,
            b1: big,
            b2: 0.0,
            status: sign_of(big),
            well_conditioned: u0.norm() <= 1e4 * diameter,
            form: ConicForm::Parabola { c1, c2 },
            ..base
        });
    }

    // Two parallel lines: degenerate hyperbola with a floored second
    // eigenvalue.
    let u0 = r1 * (-avec.dot(r1) / (2.0 * big));
    let b = a + u0.dot(avec + amat.mul_vec(u0));
    let bvec = rot.mul_vec(avec + amat.mul_vec(u0) * 2.0);
    let b2 = -sign_f(big) * (small.abs()).max(1e-13 * norm_a);
    let conic = centered_form(FaceConic {
        class: ConicClass::ParallelLines,
        psi,
        rot,
        u0,
        b,
        bvec,
        b1: big,
        b2,
        status: -sign_of(b),
        well_conditioned: u0.norm() <= 1e4 * diameter,
        ..base
    }, floor_scale);
    Some(conic)
}

/// Attach the explicit parametrization to a centered conic (elliptic,
/// hyperbolic, or the flattened-hyperbola route for parallel lines).
fn centered_form(mut conic: FaceConic, floor_scale: f64) -> FaceConic {
    // An exactly vanishing constant term is a point/crossing degeneracy;
    // nudge it off zero to keep the branch topology well defined.
    let mut b = conic.b;
    if b == 0.0 {
        b = -sign_f(conic.b1) * 1e-16 * floor_scale.max(f64::MIN_POSITIVE);
        conic.b = b;
        conic.status = -sign_of(b);
    }
    let (b1, b2) = (conic.b1, conic.b2);
    conic.form = if conic.class == ConicClass::Elliptic {
        if -b / b1 > 0.0 {
            FaceConic::ellipse_axes(b, b1, b2)
        } else {
            ConicForm::Empty
        }
    } else if -b / b1 > 0.0 {
        ConicForm::HyperbolaLr {
            p: (-b / b1).sqrt(),
            q: (b / b2).sqrt(),
        }
    } else {
        ConicForm::HyperbolaUd {
            p: (b / b1).sqrt(),
            q: (-b / b2).sqrt(),
        }
    };
    conic
}

impl FaceConic {
    fn ellipse_axes(b: f64, b1: f64, b2: f64) -> ConicForm {
        ConicForm::Ellipse {
            p: (-b / b1).sqrt(),
            q: (-b / b2).sqrt(),
        }
    }

    /// Polygon vertices in the `u` frame.
    pub fn polygon_u(&self, points: &[Vec3]) -> Vec<Vec2> {
        points.iter().map(|&p| self.u_of_point(p)).collect()
    }
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

fn sign_f(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Solve `A x = rhs` for a symmetric 2x2 system.
fn solve2(a: Matrix2<f64>, rhs: Vec2) -> Vec2 {
    let det = a.det();
    Vec2::new(
        (rhs.x * a.m[1][1] - rhs.y * a.m[0][1]) / det,
        (a.m[0][0] * rhs.y - a.m[1][0] * rhs.x) / det,
    )
}

/// Intersection check residual tolerance, applied when edge roots are mapped
/// onto the conic.
pub(super) fn check_residual(conic: &FaceConic, u: Vec2) -> Result<(), ClipError> {
    let (value, scale) = conic.residual(u);
    if value.abs() > 1e-10 * scale.max(1e-30) {
        return Err(ClipError::InconsistentIntersection {
            face: conic.face,
            residual: value.abs() / scale,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(k1: f64, k2: f64) -> ParaboloidFrame {
        ParaboloidFrame::new(
            Vec3::new(0.1, -0.05, 0.2),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
            k1,
            k2,
        )
    }

    fn square_face(z: f64) -> Vec<Vec3> {
        vec![
            Vec3::new(-1.0, -1.0, z),
            Vec3::new(1.0, -1.0, z),
            Vec3::new(1.0, 1.0, z),
            Vec3::new(-1.0, 1.0, z),
        ]
    }

    #[test]
    fn bowl_cut_by_horizontal_face_is_elliptic() {
        let f = frame(-1.0, -1.0);
        let c = classify_face(0, &square_face(-0.3), Vec3::new(0.0, 0.0, 1.0), &f, 2.8).unwrap();
        assert_eq!(c.class, ConicClass::Elliptic);
        assert!(matches!(c.form, ConicForm::Ellipse { .. }));
    }

    #[test]
    fn single_curvature_gives_parabolic() {
        // kappa1 = -19/4, kappa2 = 0, on a tilted face (neither parallel nor
        // orthogonal to the base plane).
        let f = frame(-4.75, 0.0);
        let z = |y: f64| 0.5 + 0.3 * y;
        let face = vec![
            Vec3::new(-1.0, -1.0, z(-1.0)),
            Vec3::new(1.0, -1.0, z(-1.0)),
            Vec3::new(1.0, 1.0, z(1.0)),
            Vec3::new(-1.0, 1.0, z(1.0)),
        ];
        let n_f = Vec3::new(0.0, -0.3, 1.0).normalize();
        let c = classify_face(0, &face, n_f, &f, 3.0).unwrap();
        assert_eq!(c.class, ConicClass::Parabolic);
    }

    #[test]
    fn saddle_gives_hyperbolic() {
        let f = frame(2.0, -1.5);
        let c = classify_face(0, &square_face(0.05), Vec3::new(0.0, 0.0, 1.0), &f, 2.8).unwrap();
        assert_eq!(c.class, ConicClass::Hyperbolic);
    }

    #[test]
    fn face_orthogonal_to_base_with_zero_curvature_is_linear() {
        // kappa2 = 0 and n_f orthogonal to n0 with n_f parallel to tau1:
        // the level set restricted to the face plane is affine.
        let f = frame(-4.75, 0.0);
        // face with normal tau1 = e1: plane x = 0.4
        let face = vec![
            Vec3::new(0.4, -1.0, -1.0),
            Vec3::new(0.4, 1.0, -1.0),
            Vec3::new(0.4, 1.0, 1.0),
            Vec3::new(0.4, -1.0, 1.0),
        ];
        let c = classify_face(0, &face, Vec3::new(1.0, 0.0, 0.0), &f, 2.8).unwrap();
        assert_eq!(c.class, ConicClass::Linear);
    }

    #[test]
    fn face_in_base_plane_with_zero_curvature_gives_parallel_lines() {
        let f = frame(-4.75, 0.0);
        // face parallel to the tangent plane below the base point
        let c = classify_face(0, &square_face(-0.4), Vec3::new(0.0, 0.0, 1.0), &f, 2.8).unwrap();
        assert_eq!(c.class, ConicClass::ParallelLines);
        assert!(matches!(
            c.form,
            ConicForm::HyperbolaLr { .. } | ConicForm::HyperbolaUd { .. }
        ));
    }

    #[test]
    fn plane_surface_gives_linear_everywhere() {
        let f = frame(0.0, 0.0);
        let face = vec![
            Vec3::new(0.0, 0.0, -1.0),
            Vec3::new(1.0, 0.0, -1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let c = classify_face(0, &face, Vec3::new(0.0, -1.0, 0.0), &f, 2.5).unwrap();
        assert_eq!(c.class, ConicClass::Linear);
    }

    #[test]
    fn conic_points_satisfy_raw_equation() {
        let f = frame(-2.0, 1.0);
        let c = classify_face(0, &square_face(0.11), Vec3::new(0.0, 0.0, 1.0), &f, 2.8).unwrap();
        for i in 0..16 {
            let t = -1.4 + 0.21 * i as f64;
            for &branch in &[1i8, -1] {
                let up = c.uprime(branch, t);
                let u = c.rot.transpose().mul_vec(up) + c.u0;
                // Q(u) = 0 on the curve, and Q = -lambda on the face plane
                let q = c.q_value(u);
                let x = c.point_of_uprime(up);
                assert!(q.abs() < 1e-12, "residual {q}");
                assert!((f.value(x) + q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn principal_form_is_diagonal() {
        let f = frame(-2.3, 0.9);
        let c = classify_face(0, &square_face(-0.17), Vec3::new(0.0, 0.0, 1.0), &f, 2.8).unwrap();
        let b = c.rot.mul_mat(c.amat).mul_mat(c.rot.transpose());
        assert!(b.m[0][1].abs() <= 1e-12 * c.amat.norm());
        assert!((b.m[0][0] - c.b1).abs() <= 1e-12 * c.amat.norm());
        assert!((b.m[1][1] - c.b2).abs() <= 1e-12 * c.amat.norm());
    }

    #[test]
    fn param_roundtrip() {
        let f = frame(-1.3, -0.7);
        let c = classify_face(0, &square_face(-0.2), Vec3::new(0.0, 0.0, 1.0), &f, 2.8).unwrap();
        for i in 0..12 {
            let th = 0.5 + i as f64 * 0.45;
            let up = c.uprime(0, th);
            let (br, t) = c.param_of(up);
            assert_eq!(br, 0);
            let up2 = c.uprime(br, t);
            assert!((up - up2).norm() < 1e-12);
        }
    }
}
