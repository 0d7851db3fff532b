//! Intersection of a single face edge with the paraboloid.

use super::ParaboloidFrame;
use crate::math::solve_quadratic;
use crate::Vec3;

/// Crossing direction of the edge through the surface, from the sign of the
/// edge-restricted level-set derivative at the root: negative enters the
/// interior, positive leaves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionKind {
    Entering,
    Leaving,
}

#[derive(Debug, Clone)]
pub struct EdgeClip {
    /// Root parameters in the open unit interval, ascending, with kinds.
    pub roots: Vec<(f64, IntersectionKind)>,
    /// Fraction of the edge on the interior side (`lambda <= 0`).
    pub immersed: f64,
    /// Level-set value at the edge start (after the interior-side nudge of
    /// exact zeros).
    pub lambda_start: f64,
}

/// Exact-zero vertex values are displaced to the interior side; the
/// magnitude only has to preserve the sign logic.
fn nudged(value: f64, frame: &ParaboloidFrame, x: Vec3, scale: f64) -> f64 {
    if value != 0.0 {
        return value;
    }
    let g = frame.gradient(x).norm();
    let eps = 1e-14
        * scale
        * g.max(scale * (frame.kappa1.abs() + frame.kappa2.abs()))
            .max(f64::MIN_POSITIVE);
    -eps.max(f64::MIN_POSITIVE)
}

/// Clip one edge against the paraboloid.
///
/// The restriction of the level set to the edge is the exact quadratic
/// `c2 v^2 + c1 v + c0` built from the endpoint value and gradient. Roots are
/// kept only on the open interval and only when transversal; the immersed
/// fraction follows from the root count and the sign at the start:
///
/// ```text
/// lambda(0) < 0:  none -> 1,  one -> v1,      two -> 1 - (v2 - v1)
/// lambda(0) > 0:  none -> 0,  one -> 1 - v1,  two -> v2 - v1
/// ```
pub fn edge_clip(p0: Vec3, p1: Vec3, frame: &ParaboloidFrame, scale: f64) -> EdgeClip {
    let e = p1 - p0;
    let l0 = nudged(frame.value(p0), frame, p0, scale);
    let l1 = nudged(frame.value(p1), frame, p1, scale);
    let g0 = e.dot(frame.gradient(p0));
    let c2 = l1 - l0 - g0;
    let c1 = g0;
    let c0 = l0;

    let coeff_scale = c2.abs() + c1.abs() + c0.abs();
    if coeff_scale == 0.0 {
        // Edge lies in the surface: degenerate coplanar edge, counted as
        // fully immersed with no crossings.
        return EdgeClip {
            roots: Vec::new(),
            immersed: 1.0,
            lambda_start: l0,
        };
    }

    let mut roots: Vec<(f64, IntersectionKind)> = Vec::new();
    if let Ok(cand) = solve_quadratic(c2, c1, c0) {
        for v in cand {
            if v > 0.0 && v < 1.0 {
                let slope = 2.0 * c2 * v + c1;
                if slope.abs() <= 1e-14 * coeff_scale {
                    continue; // tangential touch, no sign change
                }
                let kind = if slope < 0.0 {
                    IntersectionKind::Entering
                } else {
                    IntersectionKind::Leaving
                };
                roots.push((v, kind));
            }
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // A strict endpoint sign change guarantees an odd crossing count; if the
    // filter lost it to rounding, recover the bracketed root by bisection.
    let sign_change = l0 * l1 < 0.0;
    if sign_change && roots.len() % 2 == 0 {
        let f = |v: f64| c2 * v * v + c1 * v + c0;
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(m) < 0.0) == (l0 < 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        let v = 0.5 * (a + b);
        let kind = if l0 > 0.0 {
            IntersectionKind::Entering
        } else {
            IntersectionKind::Leaving
        };
        roots = vec![(v, kind)];
    } else if !sign_change && roots.len() % 2 == 1 {
        roots.clear();
    }

    let immersed = match (l0 < 0.0, roots.len()) {
        (true, 0) => 1.0,
        (true, 1) => roots[0].0,
        (true, _) => 1.0 - (roots[1].0 - roots[0].0),
        (false, 0) => 0.0,
        (false, 1) => 1.0 - roots[0].0,
        (false, _) => roots[1].0 - roots[0].0,
    };

    EdgeClip {
        roots,
        immersed,
        lambda_start: l0,
    }
}
