//! Immersed face areas: weighted-shoelace polygonal part plus conic caps.

use super::conic::{ConicClass, ConicForm, FaceConic};
use super::edge::EdgeClip;
use super::segment::{closed_ellipse_segment, CurveSegment};
use super::{ClipError, ClipParams, ParaboloidFrame};
use crate::{Vec2, Vec3};

pub(super) struct FaceOutcome {
    pub area: f64,
    pub segments: Vec<CurveSegment>,
    pub class: Option<ConicClass>,
    pub conic: Option<FaceConic>,
}

/// Coordinate-plane projection that preserves the counter-clockwise order:
/// drop the axis with the largest normal component and keep the cyclic pair
/// `{y,z}`, `{z,x}` or `{x,y}`.
fn projector(n_f: Vec3) -> (usize, f64) {
    let a = [n_f.x.abs(), n_f.y.abs(), n_f.z.abs()];
    let p = if a[0] >= a[1] && a[0] >= a[2] {
        0
    } else if a[1] >= a[2] {
        1
    } else {
        2
    };
    (p, n_f[p])
}

fn project(x: Vec3, p: usize) -> Vec2 {
    match p {
        0 => Vec2::new(x.y, x.z),
        1 => Vec2::new(x.z, x.x),
        _ => Vec2::new(x.x, x.y),
    }
}

/// Plain polygon area with outward normal `n_f` (CCW cycles give the
/// positive area).
pub fn polygon_area(points: &[Vec3], n_f: Vec3) -> f64 {
    let (p, denom) = projector(n_f);
    let mut acc = 0.0;
    for m in 0..points.len() {
        let a = project(points[m], p);
        let b = project(points[(m + 1) % points.len()], p);
        acc += a.cross(b);
    }
    acc / (2.0 * denom)
}

/// Immersed area of a face with edge crossings: the weighted shoelace over
/// the original edges (weights = immersed fractions) plus the chords of the
/// arcs, plus the closed-form cap between every arc and its chord.
pub(super) fn immersed_area(
    _face: usize,
    points: &[Vec3],
    n_f: Vec3,
    clips: &[EdgeClip],
    segments: &[CurveSegment],
    conic: &FaceConic,
    params: &ClipParams,
) -> Result<f64, ClipError> {
    let (p, denom) = projector(n_f);
    let mut acc = 0.0;
    for m in 0..points.len() {
        let a = project(points[m], p);
        let b = project(points[(m + 1) % points.len()], p);
        acc += a.cross(b) * clips[m].immersed;
    }
    for seg in segments {
        let a = project(seg.start_point, p);
        let b = project(seg.end_point, p);
        acc += a.cross(b);
    }
    let poly = acc / (2.0 * denom);

    let mut caps = 0.0;
    for seg in segments {
        caps += cap_area(conic, seg, params)?;
    }
    Ok(poly + caps)
}

/// `x - sin x` without cancellation for small `x`.
fn circ_defect(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x - x.sin()
    }
}

/// `x - sinh x` without cancellation for small `x`.
fn hyp_defect(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)))
    } else {
        x - x.sinh()
    }
}

/// Signed area between one arc and its chord.
///
/// The antiderivative differences collapse to `pq/2 (d - sin d)` (elliptic)
/// and `+- pq/2 (d - sinh d)` (hyperbolic branches) in the parameter
/// difference `d` alone; for short arcs `d` is reconstructed from the
/// endpoint coordinates, which stays exact when the conic is huge compared
/// to the face and the absolute parameters carry cancellation.
pub fn cap_area(
    conic: &FaceConic,
    seg: &CurveSegment,
    params: &ClipParams,
) -> Result<f64, ClipError> {
    if !conic.well_conditioned && !seg.closed {
        let a = conic.u_of_point(seg.start_point);
        let b = conic.u_of_point(seg.end_point);
        let tol = 1e-12 * (b - a).dot(b - a) + 1e-300;
        return Ok(super::refine::cap_area_refined(conic, a, b, tol));
    }
    let delta = seg.end_param - seg.start_param;
    let closed = match conic.form {
        ConicForm::Line { .. } => 0.0,
        ConicForm::Empty => 0.0,
        ConicForm::Ellipse { p, q } => {
            let d = if delta.abs() < 1e-2 && !seg.closed {
                let cl = Vec2::new(seg.start_up.x / p, seg.start_up.y / q);
                let ce = Vec2::new(seg.end_up.x / p, seg.end_up.y / q);
                cl.cross(ce).atan2(cl.dot(ce))
            } else {
                delta
            };
            0.5 * p * q * circ_defect(d)
        }
        ConicForm::HyperbolaLr { p, q } => {
            let sigma = seg.branch as f64;
            let d = if delta.abs() < 1e-2 {
                (-seg.end_up.cross(seg.start_up) / (sigma * p * q)).asinh()
            } else {
                delta
            };
            0.5 * sigma * p * q * hyp_defect(d)
        }
        ConicForm::HyperbolaUd { p, q } => {
            let sigma = seg.branch as f64;
            let d = if delta.abs() < 1e-2 {
                (seg.end_up.cross(seg.start_up) / (sigma * p * q)).asinh()
            } else {
                delta
            };
            -0.5 * sigma * p * q * hyp_defect(d)
        }
        ConicForm::Parabola { c2, .. } => {
            // parameter difference straight from the coordinates; the
            // absolute parameters can carry a distant-vertex offset
            let d = seg.end_up.x - seg.start_up.x;
            c2 / 6.0 * d * d * d
        }
    };
    if params.cap_selfcheck {
        let numeric = cap_area_quadrature(conic, seg, 1e-12);
        // The generic quadrature route differences large antiderivative and
        // chord terms; its own conditioning sets the comparison floor.
        let gdiff = (conic.green_antiderivative(seg.branch, seg.end_param)
            - conic.green_antiderivative(seg.branch, seg.start_param))
        .abs();
        let chord = 0.5 * seg.end_up.cross(seg.start_up).abs();
        let floor = 1e-12 * (gdiff + chord) + 1e-300;
        if (closed - numeric).abs() > 1e-9 * closed.abs().max(numeric.abs()).max(floor) {
            return Err(ClipError::CapMismatch {
                face: conic.face,
                closed,
                numeric,
            });
        }
    }
    Ok(closed)
}

/// The same cap through adaptive Simpson quadrature of
/// `1/2 (u1 u2' - u2 u1')` plus the chord term.
pub fn cap_area_quadrature(conic: &FaceConic, seg: &CurveSegment, tol: f64) -> f64 {
    if matches!(conic.form, ConicForm::Line { .. }) {
        return 0.0;
    }
    let f = |t: f64| {
        let u = conic.uprime(seg.branch, t);
        let du = conic.duprime(seg.branch, t);
        0.5 * u.cross(du)
    };
    let arc = adaptive_simpson(&f, seg.start_param, seg.end_param, tol, 40);
    arc + 0.5 * seg.end_up.cross(seg.start_up)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol * (1.0 + left.abs() + right.abs()) {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
}

/// Even-odd point-in-polygon test in the 2D `u` frame.
fn point_in_polygon(q: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > q.y) != (b.y > q.y) {
            let t = (q.y - a.y) / (b.y - a.y);
            if q.x < a.x + t * (b.x - a.x) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Resolve a face with no edge crossings: either uniformly immersed or dry
/// by vertex status, except for an ellipse fully enclosed in the face, which
/// contributes a closed boundary segment and a full cap.
pub(super) fn resolve_face_without_roots(
    face: usize,
    points: &[Vec3],
    n_f: Vec3,
    frame: &ParaboloidFrame,
    conic: Option<&FaceConic>,
    diameter: f64,
) -> Result<FaceOutcome, ClipError> {
    // any vertex carries the uniform status; pick the most decisive one
    let mut lam = 0.0_f64;
    for &pt in points {
        let v = frame.value(pt);
        if v.abs() > lam.abs() {
            lam = v;
        }
    }
    let interior = lam <= 0.0;
    let face_area = polygon_area(points, n_f);
    let base_area = if interior { face_area } else { 0.0 };

    if let Some(conic) = conic {
        if conic.class == ConicClass::Elliptic {
            if let ConicForm::Ellipse { .. } = conic.form {
                // Vertices on the outside of the ellipse (the sign of Q away
                // from the center is the sign of b1) and center inside the
                // polygon mean the ellipse is enclosed in the face.
                let vertices_outside = if conic.b1 > 0.0 { interior } else { !interior };
                if vertices_outside {
                    let poly_u: Vec<Vec2> = points.iter().map(|&x| conic.u_of_point(x)).collect();
                    if point_in_polygon(conic.u0, &poly_u) {
                        let seg = closed_ellipse_segment(face, conic, diameter);
                        let cap = conic.green_antiderivative(0, seg.end_param)
                            - conic.green_antiderivative(0, seg.start_param);
                        return Ok(FaceOutcome {
                            area: base_area + cap,
                            segments: vec![seg],
                            class: Some(ConicClass::Elliptic),
                            conic: Some(conic.clone()),
                        });
                    }
                }
            }
        }
    }

    Ok(FaceOutcome {
        area: base_area,
        segments: Vec::new(),
        class: None,
        conic: None,
    })
}
