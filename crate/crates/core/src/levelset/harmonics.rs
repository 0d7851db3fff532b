//! Real tesseral spherical harmonics as solid-harmonic polynomials.
//!
//! The solid harmonic `r^l Y_lm` is a homogeneous polynomial in `(x, y, z)`,
//! which gives exact Cartesian derivatives everywhere away from the origin.
//! Convention: orthonormalized over the unit sphere, Condon-Shortley phase
//! omitted.

use crate::math::{Matrix3, Vector3};

/// Sparse trivariate polynomial `sum c * x^i y^j z^k`.
#[derive(Debug, Clone, Default)]
pub struct TriPoly {
    terms: Vec<(u32, u32, u32, f64)>,
}

impl TriPoly {
    fn push(&mut self, i: u32, j: u32, k: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        for t in &mut self.terms {
            if t.0 == i && t.1 == j && t.2 == k {
                t.3 += c;
                return;
            }
        }
        self.terms.push((i, j, k, c));
    }

    pub fn scale(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.3 *= s;
        }
        self
    }

    /// Product of two polynomials.
    fn mul(&self, other: &TriPoly) -> TriPoly {
        let mut out = TriPoly::default();
        for &(i, j, k, c) in &self.terms {
            for &(p, q, r, d) in &other.terms {
                out.push(i + p, j + q, k + r, c * d);
            }
        }
        out
    }

    pub fn eval(&self, v: Vector3<f64>) -> f64 {
        let mut acc = 0.0;
        for &(i, j, k, c) in &self.terms {
            acc += c * v.x.powi(i as i32) * v.y.powi(j as i32) * v.z.powi(k as i32);
        }
        acc
    }

    pub fn derivative(&self, axis: usize) -> TriPoly {
        let mut out = TriPoly::default();
        for &(i, j, k, c) in &self.terms {
            let (e, rest) = match axis {
                0 => (i, (j, k)),
                1 => (j, (i, k)),
                _ => (k, (i, j)),
            };
            if e == 0 {
                continue;
            }
            let c2 = c * e as f64;
            match axis {
                0 => out.push(i - 1, j, k, c2),
                1 => out.push(rest.0, j - 1, k, c2),
                _ => out.push(rest.0, rest.1, k - 1, c2),
            }
        }
        out
    }
}

/// One real solid harmonic `r^l Y_lm` with its exact polynomial derivatives.
#[derive(Debug, Clone)]
pub struct SolidHarmonic {
    pub l: u32,
    pub m: i32,
    pub poly: TriPoly,
    grad: [TriPoly; 3],
    hess: [TriPoly; 6], // xx, xy, xz, yy, yz, zz
}

impl SolidHarmonic {
    pub fn new(l: u32, m: i32) -> Self {
        let poly = solid_harmonic_poly(l, m);
        let grad = [
            poly.derivative(0),
            poly.derivative(1),
            poly.derivative(2),
        ];
        let hess = [
            grad[0].derivative(0),
            grad[0].derivative(1),
            grad[0].derivative(2),
            grad[1].derivative(1),
            grad[1].derivative(2),
            grad[2].derivative(2),
        ];
        Self {
            l,
            m,
            poly,
            grad,
            hess,
        }
    }

    pub fn value(&self, x: Vector3<f64>) -> f64 {
        self.poly.eval(x)
    }

    pub fn gradient(&self, x: Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            self.grad[0].eval(x),
            self.grad[1].eval(x),
            self.grad[2].eval(x),
        )
    }

    pub fn hessian(&self, x: Vector3<f64>) -> Matrix3<f64> {
        let xx = self.hess[0].eval(x);
        let xy = self.hess[1].eval(x);
        let xz = self.hess[2].eval(x);
        let yy = self.hess[3].eval(x);
        let yz = self.hess[4].eval(x);
        let zz = self.hess[5].eval(x);
        Matrix3 {
            m: [[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]],
        }
    }
}

/// Coefficients of the Legendre polynomial `P_l(t)` (index = power of t).
fn legendre_coefficients(l: u32) -> Vec<f64> {
    let mut p0 = vec![1.0];
    if l == 0 {
        return p0;
    }
    let mut p1 = vec![0.0, 1.0];
    for k in 1..l {
        let kf = k as f64;
        // (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
        let mut next = vec![0.0; k as usize + 2];
        for (i, &c) in p1.iter().enumerate() {
            next[i + 1] += (2.0 * kf + 1.0) / (kf + 1.0) * c;
        }
        for (i, &c) in p0.iter().enumerate() {
            next[i] -= kf / (kf + 1.0) * c;
        }
        p0 = p1;
        p1 = next;
    }
    p1
}

/// `Re((x + i y)^m)` and `Im((x + i y)^m)` as polynomials.
fn chebyshev_xy(m: u32) -> (TriPoly, TriPoly) {
    let mut re = TriPoly::default();
    let mut im = TriPoly::default();
    // binomial expansion
    let mut binom = 1.0_f64;
    for k in 0..=m {
        // i^k cycles 1, i, -1, -i
        let c = binom;
        match k % 4 {
            0 => re.push(m - k, k, 0, c),
            1 => im.push(m - k, k, 0, c),
            2 => re.push(m - k, k, 0, -c),
            _ => im.push(m - k, k, 0, -c),
        }
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    (re, im)
}

/// `(x^2 + y^2 + z^2)^p`.
fn r2_power(p: u32) -> TriPoly {
    let mut r2 = TriPoly::default();
    r2.push(2, 0, 0, 1.0);
    r2.push(0, 2, 0, 1.0);
    r2.push(0, 0, 2, 1.0);
    let mut out = TriPoly::default();
    out.push(0, 0, 0, 1.0);
    for _ in 0..p {
        out = out.mul(&r2);
    }
    out
}

fn solid_harmonic_poly(l: u32, m: i32) -> TriPoly {
    let ma = m.unsigned_abs();
    assert!(ma <= l, "harmonic order |m| must not exceed degree l");
    // m-th derivative of P_l, as coefficients in t
    let mut coeffs = legendre_coefficients(l);
    for _ in 0..ma {
        let mut d = vec![0.0; coeffs.len().saturating_sub(1).max(1)];
        for (i, &c) in coeffs.iter().enumerate().skip(1) {
            d[i - 1] = c * i as f64;
        }
        coeffs = d;
    }
    // Q(z, r^2) = sum_j coeffs[j] z^j (r^2)^((l - ma - j)/2)
    let mut q = TriPoly::default();
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let rem = l - ma - j as u32;
        debug_assert!(rem % 2 == 0, "Legendre parity violated");
        let mut zj = TriPoly::default();
        zj.push(0, 0, j as u32, c);
        q = add(q, zj.mul(&r2_power(rem / 2)));
    }
    // normalization sqrt((2l+1)/(4 pi) * (l-|m|)!/(l+|m|)!)
    let mut ratio = 1.0_f64;
    for k in (l - ma + 1)..=(l + ma) {
        ratio /= k as f64;
    }
    let norm = ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) * ratio).sqrt();
    if m == 0 {
        q.scale(norm)
    } else {
        let (re, im) = chebyshev_xy(ma);
        let angular = if m > 0 { re } else { im };
        angular.mul(&q).scale(norm * std::f64::consts::SQRT_2)
    }
}

fn add(mut a: TriPoly, b: TriPoly) -> TriPoly {
    for (i, j, k, c) in b.terms {
        a.push(i, j, k, c);
    }
    a
}
