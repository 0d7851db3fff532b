//! Grouping of edge intersections into oriented conic arcs.
//!
//! Arcs of the immersed-face boundary are traversed with the immersed side
//! (`Q > 0`, i.e. `lambda < 0`) on the left. Along that traversal, every arc
//! starts where an edge *leaves* the interior and ends where one *enters*
//! it: sorting the intersections by curve parameter per branch, fixing the
//! traversal direction from the conic gradient, and pairing consecutive
//! leaving/entering points yields the arcs with no cell-level connectivity.

use super::conic::{check_residual, ConicForm, FaceConic};
use super::edge::{EdgeClip, IntersectionKind};
use super::ClipError;
use crate::{Vec2, Vec3};

/// One oriented arc of the boundary curve on a face.
#[derive(Debug, Clone)]
pub struct CurveSegment {
    pub face: usize,
    /// Hyperbola branch sign; 0 for single-branch forms.
    pub branch: i8,
    /// Parameter interval in traversal order (`end < start` is a valid
    /// direction and all downstream integrals are signed).
    pub start_param: f64,
    pub end_param: f64,
    pub start_up: Vec2,
    pub end_up: Vec2,
    pub start_point: Vec3,
    pub end_point: Vec3,
    /// Full closed curve (enclosed ellipse): endpoints coincide.
    pub closed: bool,
}

struct Crossing {
    param: f64,
    kind: IntersectionKind,
    up: Vec2,
    point: Vec3,
}

/// Build the arcs of one face from its edge clips: the ordering and pairing
/// of the intersections into leaving-to-entering arcs.
pub fn build_segments(
    face: usize,
    points: &[Vec3],
    clips: &[EdgeClip],
    conic: &FaceConic,
    diameter: f64,
) -> Result<Vec<CurveSegment>, ClipError> {
    let mut branches: Vec<(i8, Vec<Crossing>)> = Vec::new();
    let n = points.len();
    for (m, clip) in clips.iter().enumerate() {
        let p0 = points[m];
        let p1 = points[(m + 1) % n];
        for &(v, kind) in &clip.roots {
            let x = p0 + (p1 - p0) * v;
            let u = conic.u_of_point(x);
            check_residual(conic, u)?;
            let up = conic.uprime_of_u(u);
            let (branch, param) = conic.param_of(up);
            let entry = Crossing {
                param,
                kind,
                up,
                point: x,
            };
            match branches.iter_mut().find(|(b, _)| *b == branch) {
                Some((_, list)) => list.push(entry),
                None => branches.push((branch, vec![entry])),
            }
        }
    }
    branches.sort_by_key(|(b, _)| *b);

    let closed = matches!(conic.form, ConicForm::Ellipse { .. });
    let mut segments = Vec::new();
    for (branch, mut list) in branches {
        if !conic.well_conditioned {
            // Absolute parameters of a far-centered conic are pure noise;
            // coordinate-level relative parameters keep the ordering and
            // the interval lengths meaningful.
            let reference = list[0].up;
            for c in &mut list {
                c.param = conic.relative_param(branch, reference, c.up);
            }
        }
        list.sort_by(|a, b| a.param.partial_cmp(&b.param).unwrap());
        if list.len() % 2 != 0 {
            return Err(ClipError::PairingFailed {
                face,
                detail: format!("odd crossing count {} on branch {branch}", list.len()),
            });
        }
        let increasing = traversal_increasing(conic, branch, &list, diameter, face)?;
        if !increasing {
            list.reverse();
        }
        if closed {
            // Cyclic: rotate so the list starts with a leaving crossing.
            if list[0].kind == IntersectionKind::Entering {
                list.rotate_left(1);
            }
            check_alternation(face, &list)?;
            let period = 2.0 * std::f64::consts::PI;
            for pair in list.chunks(2) {
                let (l, e) = (&pair[0], &pair[1]);
                let span = if increasing {
                    (e.param - l.param).rem_euclid(period)
                } else {
                    (l.param - e.param).rem_euclid(period)
                };
                let end = if increasing {
                    l.param + span
                } else {
                    l.param - span
                };
                segments.push(CurveSegment {
                    face,
                    branch,
                    start_param: l.param,
                    end_param: end,
                    start_up: l.up,
                    end_up: e.up,
                    start_point: l.point,
                    end_point: e.point,
                    closed: false,
                });
            }
        } else {
            // Open branch: it reaches the face from outside, so the pattern
            // must be leaving, entering, leaving, entering, ...
            check_alternation(face, &list)?;
            for pair in list.chunks(2) {
                let (l, e) = (&pair[0], &pair[1]);
                segments.push(CurveSegment {
                    face,
                    branch,
                    start_param: l.param,
                    end_param: e.param,
                    start_up: l.up,
                    end_up: e.up,
                    start_point: l.point,
                    end_point: e.point,
                    closed: false,
                });
            }
        }
    }
    Ok(segments)
}

fn check_alternation(face: usize, list: &[Crossing]) -> Result<(), ClipError> {
    for (i, c) in list.iter().enumerate() {
        let want = if i % 2 == 0 {
            IntersectionKind::Leaving
        } else {
            IntersectionKind::Entering
        };
        if c.kind != want {
            return Err(ClipError::PairingFailed {
                face,
                detail: format!(
                    "crossing kinds do not alternate: {:?}",
                    list.iter().map(|c| c.kind).collect::<Vec<_>>()
                ),
            });
        }
    }
    Ok(())
}

/// Does increasing curve parameter keep the immersed side on the left?
/// The sign is constant along a conic branch; it is sampled at a crossing
/// with a usable tangent/gradient pair.
fn traversal_increasing(
    conic: &FaceConic,
    branch: i8,
    list: &[Crossing],
    diameter: f64,
    face: usize,
) -> Result<bool, ClipError> {
    for c in list {
        if let Some(increasing) = conic.interior_left_increasing(branch, c.param, diameter) {
            return Ok(increasing);
        }
    }
    Err(ClipError::PairingFailed {
        face,
        detail: "degenerate tangent/gradient at every crossing".into(),
    })
}

/// The full-circle segment added when an ellipse lies strictly inside a
/// face; the traversal direction again keeps the immersed side on the left.
pub(super) fn closed_ellipse_segment(face: usize, conic: &FaceConic, diameter: f64) -> CurveSegment {
    let increasing = conic
        .interior_left_increasing(0, 0.0, diameter)
        .unwrap_or(true);
    let span = 2.0 * std::f64::consts::PI;
    let up = conic.uprime(0, 0.0);
    let point = conic.point_of_uprime(up);
    CurveSegment {
        face,
        branch: 0,
        start_param: 0.0,
        end_param: if increasing { span } else { -span },
        start_up: up,
        end_up: up,
        start_point: point,
        end_point: point,
        closed: true,
    }
}
