//! Volume fractions of polyhedral mesh cells cut by an implicit surface.
//!
//! In every intersected cell the surface is replaced by its osculating
//! paraboloid (base point, principal tangents, principal curvatures), and the
//! volume of the truncated cell is evaluated exactly through a face-based
//! double application of the divergence theorem: immersed face areas plus a
//! line integral over the boundary of the graph base in the tangent plane.
//!
//! The crate is organized bottom-up:
//!
//! * [`math`] — small fixed-size linear algebra, root finding, quadrature
//!   (generic over the scalar type),
//! * [`levelset`] — implicit surface oracles (value / gradient / Hessian),
//! * [`mesh`] — polyhedral meshes, generators and VTK legacy I/O,
//! * [`surface`] — per-cell construction of the osculating paraboloid,
//! * [`clip`] — the paraboloid–polyhedron clipping kernel,
//! * [`vof`] — drivers: volume-fraction initialization, convergence studies,
//!   the shifted-paraboloid sweep and timing breakdowns,
//! * [`oracle`] — independent reference computations used by the test suites.

pub mod clip;
pub mod levelset;
pub mod math;
pub mod mesh;
pub mod oracle;
pub mod surface;
pub mod vof;

/// Scalar type the core math is written against: `f32`, `f64`, or anything
/// else float-like. The domain layers use the `f64` aliases below.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static
{
}

impl<T> Real for T where
    T: num_traits::Float + num_traits::FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static
{
}

pub type Vec2 = math::Vector2<f64>;
pub type Vec3 = math::Vector3<f64>;
pub type Mat2 = math::Matrix2<f64>;
pub type Mat3 = math::Matrix3<f64>;

pub use clip::{ClipParams, ClipResult, ParaboloidFrame};
pub use levelset::LevelSetField;
pub use mesh::{PolyCell, PolyMesh};
pub use surface::SurfaceCellStatus;
pub use vof::VolumeFractionField;
