//! Line integrals over the graph-base boundary in the tangent plane: the
//! cubic-primitive term of the volume formula and the graph-base area.

use super::conic::{ConicForm, FaceConic};
use super::segment::CurveSegment;
use super::{ClipParams, ClipTiming, ParaboloidFrame};
use crate::math::Matrix2;
use crate::{Vec2, Vec3};
use std::time::Instant;

/// Maximum parameter span of one Gauss-Legendre panel. Arcs are split so the
/// requested node count is already converged; only the trigonometric and
/// hyperbolic parametrizations need it (polynomial ones are integrated
/// exactly).
const PANEL_SPAN: f64 = 0.15;

/// Integrate the volume line integrand and the graph-base area over the
/// face's arcs.
///
/// Orientation: on the boundary of the immersed solid, the face piece
/// (outward normal `n_f`) and the surface patch share each arc with
/// opposite traversals, and the projection of the patch onto the tangent
/// plane preserves orientation (the graph normal keeps a positive component
/// along the base normal). The counter-clockwise boundary of the graph base
/// is therefore the *reverse* of the stored face-plane traversal, for every
/// segment and with no pointwise sign test.
pub(super) fn boundary_integral(
    segments: &[CurveSegment],
    conic: &FaceConic,
    frame: &ParaboloidFrame,
    n_f: Vec3,
    params: &ClipParams,
    mut timing: Option<&mut ClipTiming>,
) -> (f64, f64) {
    let t_setup = timing.as_ref().map(|_| Instant::now());

    // t(s) = t0 + T0 u'(s): affine map from principal face coordinates into
    // the tangent plane of the paraboloid.
    let tmu = Matrix2::new(
        frame.tau1.dot(conic.mu1),
        frame.tau1.dot(conic.mu2),
        frame.tau2.dot(conic.mu1),
        frame.tau2.dot(conic.mu2),
    );
    let t_mat = tmu.mul_mat(conic.rot.transpose());
    let w0 = conic.anchor - frame.base + conic.mu1 * conic.u0.x + conic.mu2 * conic.u0.y;
    let t_off = Vec2::new(w0.dot(frame.tau1), w0.dot(frame.tau2));

    // t of a raw face coordinate, via face-scale quantities only
    let t_of_u = |u: Vec2| -> Vec2 {
        let x = conic.anchor - frame.base + conic.mu1 * u.x + conic.mu2 * u.y;
        Vec2::new(x.dot(frame.tau1), x.dot(frame.tau2))
    };

    let _ = n_f;
    if let (Some(t), Some(acc)) = (t_setup, timing.as_deref_mut()) {
        acc.principal_transformation += t.elapsed();
    }

    let mut line_total = 0.0;
    let mut supp_total = 0.0;
    for seg in segments {
        if !conic.well_conditioned && !seg.closed {
            let t0 = timing.as_ref().map(|_| Instant::now());
            let (line, supp) = refined_boundary_integral(seg, conic, frame, params, &t_of_u);
            line_total += line;
            supp_total += supp;
            if let (Some(t), Some(acc)) = (t0, timing.as_deref_mut()) {
                acc.quadrature += t.elapsed();
            }
            continue;
        }
        let (a, b) = (seg.start_param, seg.end_param);
        let flip = -1.0; // reversed face traversal, see above

        let t_nodes = timing.as_ref().map(|_| Instant::now());
        let panels = (((b - a).abs() / PANEL_SPAN).ceil() as usize).clamp(1, 512);
        let mut line = 0.0;
        let mut supp = 0.0;
        let (k1, k2) = (frame.kappa1, frame.kappa2);
        for i in 0..panels {
            let pa = a + (b - a) * (i as f64 / panels as f64);
            let pb = a + (b - a) * ((i + 1) as f64 / panels as f64);
            let mid = 0.5 * (pa + pb);
            let rad = 0.5 * (pb - pa);
            let mut pl = 0.0;
            let mut ps = 0.0;
            for (&x, &wq) in params.rule.nodes.iter().zip(&params.rule.weights) {
                let s = mid + rad * x;
                let (u, du) = conic.uprime_pair(seg.branch, s);
                let t = t_off + t_mat.mul_vec(u);
                let dt = t_mat.mul_vec(du);
                let hhat = k1 * t.x * t.x * t.x + 3.0 * k2 * t.x * t.y * t.y;
                pl += wq * (-hhat / 6.0 * dt.y);
                ps += wq * 0.5 * (t.x * dt.y - t.y * dt.x);
            }
            line += pl * rad;
            supp += ps * rad;
        }
        line_total += flip * line;
        supp_total += flip * supp;
        if let (Some(t), Some(acc)) = (t_nodes, timing.as_deref_mut()) {
            acc.quadrature += t.elapsed();
        }
    }
    (line_total, supp_total)
}

/// Arc integration through raw-frame chord bisection, for conics whose
/// explicit parametrization is numerically meaningless. Each final sub-arc
/// contributes its straight chord (the volume integrand is polynomial along
/// a line, so the panel rule is exact) plus the parabolic cap correction:
/// the cap carries exactly its signed area for the graph-base term and
/// `-h(t_mid) * area` for the volume term.
fn refined_boundary_integral(
    seg: &CurveSegment,
    conic: &FaceConic,
    frame: &ParaboloidFrame,
    params: &ClipParams,
    t_of_u: &dyn Fn(Vec2) -> Vec2,
) -> (f64, f64) {
    let ua = conic.u_of_point(seg.start_point);
    let ub = conic.u_of_point(seg.end_point);
    if (ub - ua).norm() == 0.0 {
        return (0.0, 0.0);
    }

    let mut line = 0.0;
    let mut supp = 0.0;
    let tol = 1e-12 * (ub - ua).dot(ub - ua) + 1e-300;
    super::refine::subdivide_arc(conic, ua, ub, tol, &mut |p, m, q| {
        let tp = t_of_u(p);
        let tm = t_of_u(m);
        let tq = t_of_u(q);
        let d = tq - tp;
        line += params.rule.integrate(0.0, 1.0, |s| {
            let t = tp + d * s;
            -frame.hhat(t) / 6.0 * d.y
        });
        supp += 0.5 * tp.cross(tq);
        let cap_t = super::refine::parabolic_loop_area(tp, tm, tq);
        line += -frame.height(tm) * cap_t;
        supp += cap_t;
    });
    // reversed face traversal, as for the well-conditioned path
    (-line, -supp)
}

impl FaceConic {
    /// Point and tangent of the parametrization with one shared
    /// transcendental evaluation.
    pub fn uprime_pair(&self, branch: i8, t: f64) -> (Vec2, Vec2) {
        let sg = branch as f64;
        match self.form {
            ConicForm::Ellipse { p, q } => {
                let (s, c) = t.sin_cos();
                (Vec2::new(p * c, q * s), Vec2::new(-p * s, q * c))
            }
            ConicForm::HyperbolaLr { p, q } => {
                let e = t.exp();
                let ch = 0.5 * (e + 1.0 / e);
                let sh = 0.5 * (e - 1.0 / e);
                (Vec2::new(sg * p * ch, q * sh), Vec2::new(sg * p * sh, q * ch))
            }
            ConicForm::HyperbolaUd { p, q } => {
                let e = t.exp();
                let ch = 0.5 * (e + 1.0 / e);
                let sh = 0.5 * (e - 1.0 / e);
                (Vec2::new(p * sh, sg * q * ch), Vec2::new(p * ch, sg * q * sh))
            }
            ConicForm::Parabola { c1, c2 } => (
                Vec2::new(t, c1 * t + c2 * t * t),
                Vec2::new(1.0, c1 + 2.0 * c2 * t),
            ),
            ConicForm::Line { point, dir } => (point + dir * t, dir),
            ConicForm::Empty => unreachable!("empty conic has no points"),
        }
    }
}
