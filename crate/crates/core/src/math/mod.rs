//! Small fixed-size linear algebra, polynomial root finding and
//! Gauss-Legendre quadrature. Everything here is generic over [`crate::Real`]
//! and pure; the rest of the crate uses the `f64` aliases from the root.

mod eigen;
mod quadrature;
mod roots;
mod vec;

pub use eigen::{plane_fit, principal_rotation, sym2_eigen, symmetric_eigen_3x3};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use roots::{hermite_cubic, newton_root, solve_quadratic, RootError};
pub use vec::{KahanSum, Matrix2, Matrix3, Vector2, Vector3};

use crate::Real;

/// Shorthand for converting an `f64` literal into the working scalar.
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}
