//! Arc handling for ill-conditioned conics, entirely in the raw face frame.
//!
//! When the principal reduction of a conic is nearly degenerate, the center,
//! axes and angular parameters carry large relative errors (they come out of
//! cancelling O(1) quantities), so evaluating the explicit parametrization
//! between the endpoints is meaningless. The raw coefficients stay pristine,
//! and an arc can be resolved by recursive chord bisection: intersect the
//! conic with the perpendicular bisector of a chord (a well-scaled 1D
//! quadratic), which converges like the parabolic caps it produces.

use super::conic::FaceConic;
use crate::math::solve_quadratic;
use crate::Vec2;

/// Signed loop area of (arc approximated by the parabola through `p,m,q`)
/// followed by the chord back from `q` to `p`. Positive when that loop runs
/// counter-clockwise.
pub(super) fn parabolic_loop_area(p: Vec2, m: Vec2, q: Vec2) -> f64 {
    -(2.0 / 3.0) * (q - p).cross(m - (p + q) * 0.5)
}

/// Nearest conic point on the line `m0 + tau * dir`.
fn nearest_on_line(conic: &FaceConic, m0: Vec2, dir: Vec2) -> Option<Vec2> {
    let ad = conic.amat.mul_vec(dir);
    let c2 = dir.dot(ad);
    let c1 = (conic.amat.mul_vec(m0) * 2.0 + conic.avec).dot(dir);
    let c0 = conic.q_value(m0);
    let roots = solve_quadratic(c2, c1, c0).ok()?;
    roots
        .into_iter()
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .map(|t| m0 + dir * t)
}

/// Recursively subdivide the arc from `a` to `b` (raw coordinates, both on
/// the conic) and emit the final sub-arcs as `(start, bisector point, end)`.
/// Subdivision stops when the parabolic cap of a sub-arc is below `tol`
/// (an absolute area).
pub(super) fn subdivide_arc(
    conic: &FaceConic,
    a: Vec2,
    b: Vec2,
    tol: f64,
    sink: &mut impl FnMut(Vec2, Vec2, Vec2),
) {
    fn recurse(
        conic: &FaceConic,
        a: Vec2,
        b: Vec2,
        tol: f64,
        depth: usize,
        sink: &mut impl FnMut(Vec2, Vec2, Vec2),
    ) {
        let chord = b - a;
        let len = chord.norm();
        let mid = (a + b) * 0.5;
        let m = if len == 0.0 {
            None
        } else {
            nearest_on_line(conic, mid, chord.rot90() / len)
        };
        let m = match m {
            Some(m) => m,
            None => {
                sink(a, mid, b);
                return;
            }
        };
        let cap = parabolic_loop_area(a, m, b);
        if depth == 0 || cap.abs() <= tol {
            sink(a, m, b);
        } else {
            recurse(conic, a, m, tol, depth - 1, sink);
            recurse(conic, m, b, tol, depth - 1, sink);
        }
    }
    recurse(conic, a, b, tol, 48, sink);
}

/// Area between the arc `a -> b` and its chord, by chord bisection
/// (signed like the closed-form caps).
pub(super) fn cap_area_refined(conic: &FaceConic, a: Vec2, b: Vec2, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut chords = 0.0;
    subdivide_arc(conic, a, b, tol, &mut |p, m, q| {
        total += parabolic_loop_area(p, m, q);
        chords += 0.5 * p.cross(q);
    });
    // Green area of the polyline relative to the single long chord plus the
    // parabolic residuals of the final sub-arcs.
    total + chords + 0.5 * b.cross(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clip::{classify_face, ParaboloidFrame};
    use crate::Vec3;

    #[test]
    fn refined_cap_matches_closed_form_on_a_circle() {
        // bowl paraboloid cut by a horizontal plane: circle of radius
        // sqrt(0.4) around the base axis
        let frame = ParaboloidFrame::new(
            Vec3::new(0.0, 0.0, 0.2),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
            -1.0,
            -1.0,
        );
        let face = vec![
            Vec3::new(-2.0, -2.0, 0.0),
            Vec3::new(2.0, -2.0, 0.0),
            Vec3::new(2.0, 2.0, 0.0),
            Vec3::new(-2.0, 2.0, 0.0),
        ];
        let conic = classify_face(0, &face, Vec3::new(0.0, 0.0, 1.0), &frame, 5.7).unwrap();
        let r = 0.4_f64.sqrt();
        // quarter arc from angle 0 to pi/2 in world coordinates
        let a = conic.u_of_point(Vec3::new(r, 0.0, 0.0));
        let b = conic.u_of_point(Vec3::new(0.0, r, 0.0));
        let refined = cap_area_refined(&conic, a, b, 1e-16);
        let exact = 0.5 * r * r * (std::f64::consts::FRAC_PI_2 - 1.0);
        assert!(
            (refined.abs() - exact).abs() < 1e-12,
            "refined {refined} vs exact {exact}"
        );
    }
}
