//! Gauss-Legendre quadrature rules on [-1, 1].

use super::lit;
use crate::Real;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub order: usize,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = lit::<T>(0.5);
        let mid = (a + b) * half;
        let rad = (b - a) * half;
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + rad * x) * w;
        }
        acc * rad
    }
}

/// Standard Gauss-Legendre rule with `n` nodes, `1 <= n <= 64`.
///
/// Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
/// iteration from the Chebyshev-like initial guess; weights are
/// `2 / ((1 - x^2) P_n'(x)^2)`. Symmetry about zero is enforced exactly.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<QuadratureRule<T>, String> {
    if n < 1 || n > 64 {
        return Err(format!("quadrature order {n} out of range 1..=64"));
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let two = lit::<T>(2.0);
    let half_n = (n + 1) / 2;
    for i in 0..half_n {
        // Initial guess for the i-th root (descending).
        let theta =
            std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let mut x = lit::<T>(theta.cos());
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = two / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x.abs().min(T::one());
        weights[i] = w;
        nodes[n - 1 - i] = -nodes[i];
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
        let (_, d) = legendre(n, T::zero());
        weights[n / 2] = two / (d * d);
    }
    Ok(QuadratureRule {
        order: n,
        nodes,
        weights,
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 1..n {
        let kf = lit::<T>(k as f64);
        let a = (lit::<T>(2.0) * kf + T::one()) / (kf + T::one());
        let b = kf / (kf + T::one());
        let p2 = a * x * p1 - b * p0;
        p0 = p1;
        p1 = p2;
    }
    let nf = lit::<T>(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}
