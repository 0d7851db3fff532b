//! Symmetric eigenproblems (2x2 closed form, 3x3 Jacobi) and the
//! least-squares plane fit built on them.

use super::{lit, Matrix2, Matrix3, Vector3};
use crate::Real;

/// Eigenvalues (descending) and the rotation angle of a symmetric 2x2
/// matrix `[[a11, a12], [a12, a22]]`.
///
/// Returns `(l1, l2, psi)` with `l1 >= l2`; the eigenvector of `l1` is
/// `(cos psi, sin psi)`.
pub fn sym2_eigen<T: Real>(a11: T, a12: T, a22: T) -> (T, T, T) {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let tr = a11 + a22;
    let diff = a11 - a22;
    let rad = (diff * diff + two * two * a12 * a12).sqrt();
    let l1 = (tr + rad) * half;
    let l2 = (tr - rad) * half;
    // tan(2 psi) = 2 a12 / (a11 - a22); atan2 handles the equal-diagonal case.
    let mut psi = half * (two * a12).atan2(diff);
    // Orient psi toward the larger eigenvalue.
    let (c, s) = (psi.cos(), psi.sin());
    let q = a11 * c * c + two * a12 * c * s + a22 * s * s;
    if (q - l1).abs() > (q - l2).abs() {
        psi = psi + lit::<T>(std::f64::consts::FRAC_PI_2);
    }
    (l1, l2, psi)
}

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matrix whose *columns*
/// are the corresponding orthonormal eigenvectors. The input must be
/// symmetric to `1e-12` (relative); anything else is a contract violation.
pub fn symmetric_eigen_3x3<T: Real>(
    m: Matrix3<T>,
) -> Result<(Vector3<T>, Matrix3<T>), String> {
    if !m.is_symmetric(lit(1e-12)) {
        return Err("non-symmetric input to symmetric eigensolver".into());
    }
    let mut a = m;
    let mut v = Matrix3::identity();
    for _sweep in 0..64 {
        let off = (a.m[0][1] * a.m[0][1] + a.m[0][2] * a.m[0][2] + a.m[1][2] * a.m[1][2]).sqrt();
        if off <= T::epsilon() * a.norm().max(T::min_positive_value()) {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a.m[p][q];
            if apq == T::zero() {
                continue;
            }
            let theta = (a.m[q][q] - a.m[p][p]) / (lit::<T>(2.0) * apq);
            // Stable rotation: t = sign(theta) / (|theta| + sqrt(theta^2 + 1))
            let t = if theta >= T::zero() {
                T::one() / (theta + (theta * theta + T::one()).sqrt())
            } else {
                -T::one() / (-theta + (theta * theta + T::one()).sqrt())
            };
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            let mut rot = Matrix3::identity();
            rot.m[p][p] = c;
            rot.m[q][q] = c;
            rot.m[p][q] = s;
            rot.m[q][p] = -s;
            a = rot.transpose().mul_mat(a).mul_mat(rot);
            a.m[p][q] = T::zero();
            a.m[q][p] = T::zero();
            v = v.mul_mat(rot);
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        a.m[j][j]
            .partial_cmp(&a.m[i][i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = Vector3::new(a.m[order[0]][order[0]], a.m[order[1]][order[1]], a.m[order[2]][order[2]]);
    let vecs = Matrix3::from_rows(
        Vector3::new(v.m[0][order[0]], v.m[0][order[1]], v.m[0][order[2]]),
        Vector3::new(v.m[1][order[0]], v.m[1][order[1]], v.m[1][order[2]]),
        Vector3::new(v.m[2][order[0]], v.m[2][order[1]], v.m[2][order[2]]),
    );
    Ok((vals, vecs))
}

/// Least-squares plane through a point cloud.
///
/// The normal is the eigenvector of the smallest eigenvalue of the Gram
/// matrix `Y Y^T` of the centered points (the PCA route; equivalent to the
/// singular vector of the smallest singular value of `Y`). Needs at least
/// three points spanning a plane.
pub fn plane_fit<T: Real>(points: &[Vector3<T>]) -> Result<(Vector3<T>, Vector3<T>), String> {
    if points.len() < 3 {
        return Err("degenerate point cloud".into());
    }
    let inv_n = T::one() / lit::<T>(points.len() as f64);
    let mut centroid = Vector3::zero();
    for &p in points {
        centroid += p;
    }
    centroid = centroid * inv_n;
    let mut gram = Matrix3::zero();
    let mut spread = T::zero();
    for &p in points {
        let d = p - centroid;
        gram = gram + d.outer(d);
        spread = spread.max(d.norm());
    }
    let (vals, vecs) = symmetric_eigen_3x3(gram)?;
    // rank >= 2 requires the second eigenvalue to be well above noise
    if vals.y <= lit::<T>(1e-24) * (spread * spread).max(T::min_positive_value()) {
        return Err("degenerate point cloud".into());
    }
    let normal = vecs.col(2).normalize();
    Ok((centroid, normal))
}

/// 2D analogue used by the conic classification: eigenvalues of
/// `[[a11, a12], [a12, a22]]` as a `Matrix2` rotation pair.
pub fn principal_rotation<T: Real>(a: Matrix2<T>) -> (T, T, Matrix2<T>) {
    let (l1, l2, psi) = sym2_eigen(a.m[0][0], a.m[0][1], a.m[1][1]);
    (l1, l2, Matrix2::rotation(psi))
}
