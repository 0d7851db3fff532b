//! Implicit surface fields: value, gradient and Hessian oracles.
//!
//! The interior convention throughout the crate is `value(x) <= 0` inside.
//! Gradients and Hessians are analytic for every field; the test suite pins
//! them against central finite differences.

mod harmonics;
mod perturbed;
pub mod rng;

pub use harmonics::SolidHarmonic;
pub use perturbed::{sample_perturbed_sphere, PerturbedSphereField};

use crate::clip::ParaboloidFrame;
use crate::math::Matrix3;
use crate::{Mat3, Vec3};

/// Implicit surface oracle. Implementations must be pure; evaluation from
/// multiple threads is relied upon.
pub trait LevelSetField: Sync {
    fn value(&self, x: Vec3) -> f64;
    fn gradient(&self, x: Vec3) -> Vec3;
    /// Symmetric second-derivative matrix.
    fn hessian(&self, x: Vec3) -> Mat3;
}

/// Sphere in signed-distance form `|x - c| - r`, so the Hessian directly
/// carries the surface curvature.
#[derive(Debug, Clone)]
pub struct SphereField {
    pub center: Vec3,
    pub radius: f64,
}

impl SphereField {
    pub fn new(center: Vec3, radius: f64) -> Self {
        assert!(radius > 0.0, "sphere radius must be positive");
        Self { center, radius }
    }
}

// The value extends continuously into the center (-radius); gradient and
// Hessian do not. Derivatives at the exact center return the symmetric
// zero so that edge interpolants seeded from a center vertex degrade
// gracefully instead of aborting.
impl LevelSetField for SphereField {
    fn value(&self, x: Vec3) -> f64 {
        (x - self.center).norm() - self.radius
    }

    fn gradient(&self, x: Vec3) -> Vec3 {
        let d = x - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Vec3::zero();
        }
        d / r
    }

    fn hessian(&self, x: Vec3) -> Mat3 {
        let d = x - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Mat3::zero();
        }
        let n = d / r;
        (Matrix3::identity() - n.outer(n)) * (1.0 / r)
    }
}

/// Axis-aligned ellipsoid in quadratic form `sum ((x_i - c_i)/a_i)^2 - 1`.
#[derive(Debug, Clone)]
pub struct EllipsoidField {
    pub center: Vec3,
    pub semiaxes: Vec3,
}

impl EllipsoidField {
    pub fn new(center: Vec3, a: f64, b: f64, c: f64) -> Self {
        assert!(a > 0.0 && b > 0.0 && c > 0.0, "semiaxes must be positive");
        Self {
            center,
            semiaxes: Vec3::new(a, b, c),
        }
    }
}

impl LevelSetField for EllipsoidField {
    fn value(&self, x: Vec3) -> f64 {
        let d = x - self.center;
        let a = self.semiaxes;
        (d.x / a.x).powi(2) + (d.y / a.y).powi(2) + (d.z / a.z).powi(2) - 1.0
    }

    fn gradient(&self, x: Vec3) -> Vec3 {
        let d = x - self.center;
        let a = self.semiaxes;
        Vec3::new(
            2.0 * d.x / (a.x * a.x),
            2.0 * d.y / (a.y * a.y),
            2.0 * d.z / (a.z * a.z),
        )
    }

    fn hessian(&self, _x: Vec3) -> Mat3 {
        let a = self.semiaxes;
        Matrix3::diagonal(Vec3::new(
            2.0 / (a.x * a.x),
            2.0 / (a.y * a.y),
            2.0 / (a.z * a.z),
        ))
    }
}

/// Level-set form of a (shifted) paraboloid:
/// `<x - b, n0> - (x - b)^T tau K tau^T (x - b) - s` with `K = diag(k1, k2)/2`.
///
/// The zero set is the graph `x = b + tau t + (h(t) + s) n0` over the tangent
/// plane, with `h(t) = (k1 t1^2 + k2 t2^2) / 2`.
#[derive(Debug, Clone)]
pub struct ParaboloidField {
    pub frame: ParaboloidFrame,
    pub shift: f64,
}

impl ParaboloidField {
    pub fn new(frame: ParaboloidFrame, shift: f64) -> Self {
        Self { frame, shift }
    }

    fn curvature_matrix(&self) -> Mat3 {
        let f = &self.frame;
        f.tau1.outer(f.tau1) * (0.5 * f.kappa1) + f.tau2.outer(f.tau2) * (0.5 * f.kappa2)
    }
}

impl LevelSetField for ParaboloidField {
    fn value(&self, x: Vec3) -> f64 {
        let f = &self.frame;
        let d = x - f.base;
        d.dot(f.normal)
            - 0.5 * (f.kappa1 * d.dot(f.tau1).powi(2) + f.kappa2 * d.dot(f.tau2).powi(2))
            - self.shift
    }

    fn gradient(&self, x: Vec3) -> Vec3 {
        let f = &self.frame;
        let d = x - f.base;
        f.normal - f.tau1 * (f.kappa1 * d.dot(f.tau1)) - f.tau2 * (f.kappa2 * d.dot(f.tau2))
    }

    fn hessian(&self, _x: Vec3) -> Mat3 {
        self.curvature_matrix() * (-2.0)
    }
}

/// Closed-form enclosed volumes for the surfaces used in the experiments.
#[derive(Debug, Clone)]
pub enum Surface {
    Sphere(SphereField),
    Ellipsoid(EllipsoidField),
    PerturbedSphere(PerturbedSphereField),
}

impl Surface {
    pub fn field(&self) -> &dyn LevelSetField {
        match self {
            Surface::Sphere(f) => f,
            Surface::Ellipsoid(f) => f,
            Surface::PerturbedSphere(f) => f,
        }
    }

    /// Exact enclosed volume: `4 pi r^3 / 3`, `4 pi a b c / 3`, or
    /// `c00 sqrt(4 pi) / 3` for the harmonic expansion of the cubed radius.
    pub fn exact_enclosed_volume(&self) -> f64 {
        let pi = std::f64::consts::PI;
        match self {
            Surface::Sphere(f) => 4.0 / 3.0 * pi * f.radius.powi(3),
            Surface::Ellipsoid(f) => {
                4.0 / 3.0 * pi * f.semiaxes.x * f.semiaxes.y * f.semiaxes.z
            }
            Surface::PerturbedSphere(f) => f.coefficients()[0] * (4.0 * pi).sqrt() / 3.0,
        }
    }

    /// Parse a CLI surface descriptor:
    /// `sphere:r=0.8`, `ellipsoid:a=0.75,b=0.5,c=0.25`,
    /// `psphere:r=0.8,L=3,var=5e-4,seed=1`.
    pub fn parse(desc: &str) -> Result<Self, String> {
        let (kind, rest) = desc
            .split_once(':')
            .ok_or_else(|| format!("malformed surface descriptor `{desc}`"))?;
        let mut kv = std::collections::HashMap::new();
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("malformed surface parameter `{part}`"))?;
            kv.insert(k.trim(), v.trim());
        }
        let get = |k: &str| -> Result<f64, String> {
            kv.get(k)
                .ok_or_else(|| format!("surface descriptor missing `{k}`"))?
                .parse::<f64>()
                .map_err(|e| format!("bad value for `{k}`: {e}"))
        };
        match kind {
            "sphere" => Ok(Surface::Sphere(SphereField::new(Vec3::zero(), get("r")?))),
            "ellipsoid" => Ok(Surface::Ellipsoid(EllipsoidField::new(
                Vec3::zero(),
                get("a")?,
                get("b")?,
                get("c")?,
            ))),
            "psphere" => {
                let seed = kv
                    .get("seed")
                    .ok_or("surface descriptor missing `seed`")?
                    .parse::<u64>()
                    .map_err(|e| format!("bad value for `seed`: {e}"))?;
                let order = kv
                    .get("L")
                    .ok_or("surface descriptor missing `L`")?
                    .parse::<u32>()
                    .map_err(|e| format!("bad value for `L`: {e}"))?;
                let field =
                    sample_perturbed_sphere(get("r")?, order, get("var")?, seed).map_err(|e| e)?;
                Ok(Surface::PerturbedSphere(field))
            }
            other => Err(format!("unknown surface kind `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(field: &dyn LevelSetField, x: Vec3) {
        let h = 1e-5;
        let g = field.gradient(x);
        let hess = field.hessian(x);
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (field.value(xp) - field.value(xm)) / (2.0 * h);
            let scale = g.norm().max(1e-12);
            assert!(
                (g[i] - fd).abs() / scale < 1e-6,
                "gradient mismatch {:?} vs fd {:?}",
                g[i],
                fd
            );
            let gp = field.gradient(xp);
            let gm = field.gradient(xm);
            for j in 0..3 {
                let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                let hscale = hess.norm().max(1e-9);
                assert!(
                    (hess.m[i][j] - fd2).abs() / hscale < 1e-5,
                    "hessian mismatch at ({i},{j}): {} vs {}",
                    hess.m[i][j],
                    fd2
                );
            }
        }
    }

    #[test]
    fn sphere_values() {
        let s = SphereField::new(Vec3::zero(), 0.8);
        assert!(s.value(Vec3::new(0.8, 0.0, 0.0)).abs() < 1e-15);
        assert!((s.value(Vec3::new(0.4, 0.0, 0.0)) + 0.4).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "singular evaluation point")]
    fn perturbed_sphere_singular_center_gradient() {
        let f = sample_perturbed_sphere(0.8, 3, 5e-4, 1).unwrap();
        let _ = f.gradient(Vec3::zero());
    }

    #[test]
    fn perturbed_sphere_center_value_is_interior() {
        let f = sample_perturbed_sphere(0.8, 3, 5e-4, 1).unwrap();
        assert!(f.value(Vec3::zero()) < 0.0);
    }

    #[test]
    fn sphere_center_value_extends() {
        let s = SphereField::new(Vec3::zero(), 0.8);
        assert_eq!(s.value(Vec3::zero()), -0.8);
        assert_eq!(s.gradient(Vec3::zero()), Vec3::zero());
    }

    #[test]
    fn prolate_ellipsoid_on_surface() {
        let e = EllipsoidField::new(Vec3::zero(), 0.75, 0.5, 0.25);
        assert!(e.value(Vec3::new(0.75, 0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn derivative_oracles_at_seeded_points() {
        let sphere = SphereField::new(Vec3::zero(), 0.8);
        let ell = EllipsoidField::new(Vec3::zero(), 0.75, 0.5, 0.25);
        let psph = sample_perturbed_sphere(0.8, 3, 5e-4, 1).unwrap();
        let frame = ParaboloidFrame::new(
            Vec3::new(0.1, -0.2, 0.05),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 0.0),
            -1.25,
            0.4,
        );
        let par = ParaboloidField::new(frame, 0.3);
        let fields: [&dyn LevelSetField; 4] = [&sphere, &ell, &psph, &par];
        let mut rng = rng::SplitMix64::new(2024);
        for _ in 0..1000 {
            let x = Vec3::new(
                rng.next_range(-1.0, 1.0),
                rng.next_range(-1.0, 1.0),
                rng.next_range(-1.0, 1.0),
            );
            if x.norm() < 0.05 {
                continue;
            }
            for f in fields {
                fd_check(f, x);
            }
        }
    }

    #[test]
    fn paraboloid_graph_identity() {
        // lambda(base + tau t + (h(t)+s) n0) == 0 for random t.
        let frame = ParaboloidFrame::new(
            Vec3::new(0.3, 0.1, -0.4),
            Vec3::new(1.0, 2.0, -1.0).normalize(),
            Vec3::new(2.0, -1.0, 0.0).normalize(),
            2.5,
            -0.75,
        );
        let s = 0.37;
        let field = ParaboloidField::new(frame.clone(), s);
        let mut rng = rng::SplitMix64::new(5);
        for _ in 0..200 {
            let t1 = rng.next_range(-1.0, 1.0);
            let t2 = rng.next_range(-1.0, 1.0);
            let h = 0.5 * (frame.kappa1 * t1 * t1 + frame.kappa2 * t2 * t2);
            let x = frame.base + frame.tau1 * t1 + frame.tau2 * t2 + frame.normal * (h + s);
            assert!(field.value(x).abs() < 1e-12);
        }
    }

    #[test]
    fn descriptor_parsing() {
        assert!(Surface::parse("sphere:r=0.8").is_ok());
        assert!(Surface::parse("ellipsoid:a=0.75,b=0.5,c=0.25").is_ok());
        assert!(Surface::parse("psphere:r=0.8,L=3,var=5e-4,seed=1").is_ok());
        assert!(Surface::parse("torus:r=1").is_err());
        let v = Surface::parse("ellipsoid:a=0.8,b=0.8,c=0.4")
            .unwrap()
            .exact_enclosed_volume();
        assert!((v - 4.0 / 3.0 * std::f64::consts::PI * 0.256).abs() < 1e-12);
    }
}
