//! Root finding: quadratics in stable form and a bisection-safeguarded
//! Newton iteration on a bracket.

use thiserror::Error;

use super::lit;
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("degenerate identity equation")]
    DegenerateIdentity,
    #[error("no bracketed root")]
    NoBracket,
    #[error("root iteration stalled")]
    Stalled,
}

/// All real roots of `c2 x^2 + c1 x + c0 = 0`, ascending.
///
/// The second root is recovered from the product `c0/c2` so that the small
/// root of an ill-conditioned pair does not suffer cancellation. `c2 = 0`
/// degrades to the linear case; all coefficients zero is rejected.
pub fn solve_quadratic<T: Real>(c2: T, c1: T, c0: T) -> Result<Vec<T>, RootError> {
    let zero = T::zero();
    if c2 == zero {
        if c1 == zero {
            return if c0 == zero {
                Err(RootError::DegenerateIdentity)
            } else {
                Ok(vec![])
            };
        }
        return Ok(vec![-c0 / c1]);
    }
    let four = lit::<T>(4.0);
    let disc = c1 * c1 - four * c2 * c0;
    if disc < zero {
        return Ok(vec![]);
    }
    if disc == zero {
        return Ok(vec![-c1 / (c2 + c2)]);
    }
    let sq = disc.sqrt();
    // q = -(c1 + sign(c1) sqrt(disc)) / 2 avoids subtracting nearly equal terms.
    let q = if c1 >= zero {
        -(c1 + sq) / (T::one() + T::one())
    } else {
        -(c1 - sq) / (T::one() + T::one())
    };
    let (r1, r2) = if q == zero {
        (zero, -c1 / c2)
    } else {
        (q / c2, c0 / q)
    };
    Ok(if r1 <= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    })
}

/// Newton iteration on `[lo, hi]`, falling back to a bisection step whenever
/// the update leaves the current bracket. `f` returns `(value, derivative)`.
/// Stops when `|f| <= tol`.
pub fn newton_root<T: Real>(
    mut f: impl FnMut(T) -> (T, T),
    lo: T,
    hi: T,
    tol: T,
) -> Result<T, RootError> {
    let (mut a, mut b) = (lo, hi);
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(RootError::NoBracket);
    }
    let mut neg_at_a = fa < T::zero();
    let half = lit::<T>(0.5);
    let mut x = (a + b) * half;
    for _ in 0..100 {
        let (fx, dfx) = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if (fx < T::zero()) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        x = if dfx != T::zero() && newton > a.min(b) && newton < a.max(b) {
            newton
        } else {
            (a + b) * half
        };
        // Keep the bracket oriented so the sign bookkeeping stays valid.
        if a > b {
            std::mem::swap(&mut a, &mut b);
            neg_at_a = !neg_at_a;
        }
        if (b - a).abs() <= T::epsilon() * (a.abs() + b.abs() + T::one()) {
            let (fm, _) = f(x);
            if fm.abs() <= tol.max(T::epsilon() * lit(16.0)) {
                return Ok(x);
            }
        }
    }
    let (fx, _) = f(x);
    if fx.abs() <= tol * lit(16.0) {
        Ok(x)
    } else {
        Err(RootError::Stalled)
    }
}

/// Value and derivative of the cubic Hermite interpolant on `[0, 1]` with
/// endpoint values `(f0, f1)` and endpoint derivatives `(g0, g1)`.
pub fn hermite_cubic<T: Real>(f0: T, f1: T, g0: T, g1: T, v: T) -> (T, T) {
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let v2 = v * v;
    let v3 = v2 * v;
    let h00 = two * v3 - three * v2 + one;
    let h10 = v3 - two * v2 + v;
    let h01 = -two * v3 + three * v2;
    let h11 = v3 - v2;
    let value = f0 * h00 + g0 * h10 + f1 * h01 + g1 * h11;
    let six = three + three;
    let d00 = six * v2 - six * v;
    let d10 = three * v2 - two * two * v + one;
    let d01 = -six * v2 + six * v;
    let d11 = three * v2 - two * v;
    let deriv = f0 * d00 + g0 * d10 + f1 * d01 + g1 * d11;
    (value, deriv)
}
