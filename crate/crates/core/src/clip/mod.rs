//! Exact-by-construction volume of a polyhedron truncated by a paraboloid.
//!
//! The volume of the interior part (level set of the paraboloid `<= 0`) is
//! assembled from face-based quantities only:
//!
//! ```text
//! |cell^-| = 1/3 [ sum_k <x_k1 - base, n_k> A_k  +  closed line integral over
//!                  the boundary of the graph base in the tangent plane ]
//! ```
//!
//! Per face this needs the immersed area `A_k` (polygonal part plus conic
//! caps) and the face's conic arcs mapped into the tangent plane. No cell
//! level topology is ever assembled; arcs are oriented locally.

mod area;
mod conic;
mod edge;
mod integral;
mod refine;
mod segment;

pub use area::{cap_area, cap_area_quadrature, polygon_area};
pub use conic::{classify_face, ConicClass, ConicForm, FaceConic};
pub use edge::{edge_clip, EdgeClip, IntersectionKind};
pub use segment::{build_segments, CurveSegment};

use crate::math::{KahanSum, QuadratureRule};
use crate::mesh::PolyCell;
use crate::{Vec2, Vec3};
use thiserror::Error;

/// Osculating-paraboloid frame: base point on the surface, unit normal,
/// principal tangents and curvatures. `{tau1, tau2, normal}` is a
/// right-handed orthonormal triad.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaboloidFrame {
    pub base: Vec3,
    pub normal: Vec3,
    pub tau1: Vec3,
    pub tau2: Vec3,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl ParaboloidFrame {
    /// Build a frame from a base point, normal direction and a first tangent
    /// direction (orthonormalized against the normal); `tau2 = n x tau1`.
    pub fn new(base: Vec3, normal: Vec3, tau1: Vec3, kappa1: f64, kappa2: f64) -> Self {
        let n = normal.normalize();
        let t1 = (tau1 - n * tau1.dot(n)).normalize();
        let t2 = n.cross(t1);
        Self {
            base,
            normal: n,
            tau1: t1,
            tau2: t2,
            kappa1,
            kappa2,
        }
    }

    pub fn from_parts(
        base: Vec3,
        normal: Vec3,
        tau1: Vec3,
        tau2: Vec3,
        kappa1: f64,
        kappa2: f64,
    ) -> Self {
        debug_assert!((normal.norm() - 1.0).abs() < 1e-12);
        debug_assert!(tau1.dot(normal).abs() < 1e-10);
        debug_assert!((tau1.cross(tau2) - normal).norm() < 1e-10);
        Self {
            base,
            normal,
            tau1,
            tau2,
            kappa1,
            kappa2,
        }
    }

    /// Level-set value of the paraboloid; `<= 0` is the interior side.
    pub fn value(&self, x: Vec3) -> f64 {
        let d = x - self.base;
        d.dot(self.normal)
            - 0.5 * (self.kappa1 * d.dot(self.tau1).powi(2)
                + self.kappa2 * d.dot(self.tau2).powi(2))
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        let d = x - self.base;
        self.normal
            - self.tau1 * (self.kappa1 * d.dot(self.tau1))
            - self.tau2 * (self.kappa2 * d.dot(self.tau2))
    }

    /// Tangent-plane coordinates of a point.
    pub fn local(&self, x: Vec3) -> Vec2 {
        let d = x - self.base;
        Vec2::new(d.dot(self.tau1), d.dot(self.tau2))
    }

    /// Height of the paraboloid graph over the tangent plane.
    pub fn height(&self, t: Vec2) -> f64 {
        0.5 * (self.kappa1 * t.x * t.x + self.kappa2 * t.y * t.y)
    }

    /// Cubic primitive kernel `k1 t1^3 + 3 k2 t1 t2^2` of the divergence-free
    /// reformulation (reference point fixed at the base).
    pub fn hhat(&self, t: Vec2) -> f64 {
        self.kappa1 * t.x * t.x * t.x + 3.0 * self.kappa2 * t.x * t.y * t.y
    }

    /// Same zero set shifted by `s` along the base normal.
    pub fn shifted(&self, s: f64) -> Self {
        let mut f = self.clone();
        f.base = f.base + f.normal * s;
        f
    }

    /// Frame of the sign-flipped level set (swaps interior and exterior);
    /// stays right-handed.
    pub fn complemented(&self) -> Self {
        Self {
            base: self.base,
            normal: -self.normal,
            tau1: self.tau1,
            tau2: -self.tau2,
            kappa1: -self.kappa1,
            kappa2: -self.kappa2,
        }
    }
}

/// Kernel options.
#[derive(Debug, Clone)]
pub struct ClipParams {
    /// Gauss-Legendre nodes per quadrature panel.
    pub quad_nodes: usize,
    /// Re-check every closed-form cap against adaptive quadrature
    /// (validation runs; off in production).
    pub cap_selfcheck: bool,
    pub(crate) rule: QuadratureRule<f64>,
}

impl ClipParams {
    pub fn new(quad_nodes: usize) -> Result<Self, ClipError> {
        let rule = crate::math::gauss_legendre(quad_nodes)
            .map_err(|e| ClipError::Parameter(e))?;
        Ok(Self {
            quad_nodes,
            cap_selfcheck: false,
            rule,
        })
    }

    pub fn with_selfcheck(mut self) -> Self {
        self.cap_selfcheck = true;
        self
    }
}

impl Default for ClipParams {
    fn default() -> Self {
        Self::new(5).expect("default quadrature order is valid")
    }
}

#[derive(Debug, Error)]
pub enum ClipError {
    #[error("{0}")]
    Parameter(String),
    #[error("face {face}: intersection pairing failed ({detail})")]
    PairingFailed { face: usize, detail: String },
    #[error("face {face}: inconsistent intersection (conic residual {residual:e})")]
    InconsistentIntersection { face: usize, residual: f64 },
    #[error("face {face}: cap closed form {closed:e} disagrees with quadrature {numeric:e}")]
    CapMismatch {
        face: usize,
        closed: f64,
        numeric: f64,
    },
    #[error("face {face}: trivial conic carries edge intersections")]
    TrivialConic { face: usize },
}

/// Counts of boundary-curve classes encountered across the faces of one clip.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassHistogram {
    pub elliptic: usize,
    pub hyperbolic: usize,
    pub parabolic: usize,
    pub linear: usize,
    pub parallel_lines: usize,
}

impl ClassHistogram {
    fn bump(&mut self, class: ConicClass) {
        match class {
            ConicClass::Elliptic => self.elliptic += 1,
            ConicClass::Hyperbolic => self.hyperbolic += 1,
            ConicClass::Parabolic => self.parabolic += 1,
            ConicClass::Linear => self.linear += 1,
            ConicClass::ParallelLines => self.parallel_lines += 1,
        }
    }
}

/// Output of one paraboloid-polyhedron clip.
#[derive(Debug, Clone)]
pub struct ClipResult {
    /// Volume of the interior part of the cell.
    pub volume: f64,
    /// Area of the graph base (projection of the enclosed surface patch onto
    /// the tangent plane); equals `|cell| d rho / d s` along a normal shift.
    pub supp_area: f64,
    /// Immersed area per face.
    pub face_areas: Vec<f64>,
    pub class_histogram: ClassHistogram,
}

/// Wall-clock split of the kernel stages, for the timing report.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClipTiming {
    pub face_intersection: std::time::Duration,
    pub principal_transformation: std::time::Duration,
    pub interiority_check: std::time::Duration,
    pub reconstruction: std::time::Duration,
    pub quadrature: std::time::Duration,
}

impl std::ops::AddAssign for ClipTiming {
    fn add_assign(&mut self, o: Self) {
        self.face_intersection += o.face_intersection;
        self.principal_transformation += o.principal_transformation;
        self.interiority_check += o.interiority_check;
        self.reconstruction += o.reconstruction;
        self.quadrature += o.quadrature;
    }
}

/// Volume of `{lambda_frame <= 0}` inside the cell, with per-face immersed
/// areas and the graph-base area.
pub fn clip_volume(
    cell: &PolyCell,
    frame: &ParaboloidFrame,
    params: &ClipParams,
) -> Result<ClipResult, ClipError> {
    clip_volume_timed(cell, frame, params, None)
}

pub fn clip_volume_timed(
    cell: &PolyCell,
    frame: &ParaboloidFrame,
    params: &ClipParams,
    mut timing: Option<&mut ClipTiming>,
) -> Result<ClipResult, ClipError> {
    let diameter = cell.diameter();
    let mut face_sum = KahanSum::default();
    let mut line_sum = KahanSum::default();
    let mut supp_sum = KahanSum::default();
    let mut face_areas = Vec::with_capacity(cell.faces.len());
    let mut histogram = ClassHistogram::default();

    for (k, face) in cell.faces.iter().enumerate() {
        let points: Vec<Vec3> = face.iter().map(|&i| cell.vertices[i as usize]).collect();
        let normal = crate::mesh::newell_normal(&points);
        let area_vec_norm = normal.norm();
        if area_vec_norm == 0.0 {
            face_areas.push(0.0);
            continue;
        }
        let n_f = normal / area_vec_norm;

        let t0 = timing.as_ref().map(|_| std::time::Instant::now());
        let clips: Vec<EdgeClip> = (0..points.len())
            .map(|m| {
                let p0 = points[m];
                let p1 = points[(m + 1) % points.len()];
                edge_clip(p0, p1, frame, diameter)
            })
            .collect();
        if let (Some(t), Some(acc)) = (t0, timing.as_deref_mut()) {
            acc.face_intersection += t.elapsed();
        }

        let n_roots: usize = clips.iter().map(|c| c.roots.len()).sum();

        let t0 = timing.as_ref().map(|_| std::time::Instant::now());
        let conic = classify_face(k, &points, n_f, frame, diameter);
        if let (Some(t), Some(acc)) = (t0, timing.as_deref_mut()) {
            acc.principal_transformation += t.elapsed();
        }

        let face_result = if n_roots == 0 {
            let t0 = timing.as_ref().map(|_| std::time::Instant::now());
            let r = area::resolve_face_without_roots(k, &points, n_f, frame, conic.as_ref(), diameter)?;
            if let (Some(t), Some(acc)) = (t0, timing.as_deref_mut()) {
                acc.interiority_check += t.elapsed();
            }
            r
        } else {
            let conic = match conic {
                Some(c) => c,
                None => return Err(ClipError::TrivialConic { face: k }),
            };
            // parameter inversion onto the principal frame
            let t0 = timing.as_ref().map(|_| std::time::Instant::now());
            let segments = segment::build_segments(k, &points, &clips, &conic, diameter)?;
            if let (Some(t), Some(acc)) = (t0, timing.as_deref_mut()) {
                acc.principal_transformation += t.elapsed();
            }
            let t0 = timing.as_ref().map(|_| std::time::Instant::now());
            let area = area::immersed_area(k, &points, n_f, &clips, &segments, &conic, params)?;
            if let (Some(t), Some(acc)) = (t0, timing.as_deref_mut()) {
                acc.reconstruction += t.elapsed();
            }
            area::FaceOutcome {
                area,
                segments,
                class: Some(conic.class),
                conic: Some(conic),
            }
        };

        if let Some(class) = face_result.class {
            histogram.bump(class);
        }

        let d_k = (points[0] - frame.base).dot(n_f);
        face_sum.add(d_k * face_result.area);
        face_areas.push(face_result.area);

        if !face_result.segments.is_empty() {
            let conic = face_result
                .conic
                .as_ref()
                .expect("segments imply a classified conic");
            let (line, supp) = integral::boundary_integral(
                &face_result.segments,
                conic,
                frame,
                n_f,
                params,
                timing.as_deref_mut(),
            );
            line_sum.add(line);
            supp_sum.add(supp);
        }
    }

    let raw = (face_sum.value() + line_sum.value()) / 3.0;
    let cell_volume = cell.volume();
    let tol = 1e-12 * cell_volume.abs().max(f64::MIN_POSITIVE);
    let volume = if raw < 0.0 && raw > -tol {
        0.0
    } else if raw > cell_volume && raw < cell_volume + tol {
        cell_volume
    } else {
        raw
    };

    Ok(ClipResult {
        volume,
        supp_area: supp_sum.value(),
        face_areas,
        class_histogram: histogram,
    })
}

/// Clip with the frame and with its sign-flipped complement; the two volumes
/// partition the cell.
pub fn clip_complement_check(
    cell: &PolyCell,
    frame: &ParaboloidFrame,
    params: &ClipParams,
) -> Result<(f64, f64), ClipError> {
    let v = clip_volume(cell, frame, params)?.volume;
    let vbar = clip_volume(cell, &frame.complemented(), params)?.volume;
    Ok((v, vbar))
}
