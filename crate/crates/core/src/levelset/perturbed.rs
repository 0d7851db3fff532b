//! Spheres with a harmonically perturbed radius. The *cubed* radius is
//! expanded in real tesseral harmonics, `r^3 = sum c_lm Y_lm`, which keeps
//! the enclosed volume at the closed form `c00 sqrt(4 pi) / 3` for any
//! coefficient draw.

use super::harmonics::SolidHarmonic;
use super::rng::SplitMix64;
use super::LevelSetField;
use crate::math::Matrix3;
use crate::{Mat3, Vec3};

#[derive(Debug, Clone)]
pub struct PerturbedSphereField {
    center: Vec3,
    order: u32,
    coefficients: Vec<f64>,
    harmonics: Vec<SolidHarmonic>,
}

/// Draw the `(L+1)^2` coefficients: `c00 = sqrt(4 pi) R0^3`, higher modes
/// Gaussian via the Box-Muller form `sqrt(var) sqrt(-2 ln g1) cos(2 pi g2)`
/// from a seeded SplitMix64 stream. Deterministic for a fixed seed.
pub fn sample_perturbed_sphere(
    radius: f64,
    order: u32,
    variance: f64,
    seed: u64,
) -> Result<PerturbedSphereField, String> {
    if radius <= 0.0 {
        return Err("perturbed sphere base radius must be positive".into());
    }
    if variance < 0.0 {
        return Err("perturbed sphere variance must be non-negative".into());
    }
    let mut rng = SplitMix64::new(seed);
    let mut coefficients = Vec::with_capacity(((order + 1) * (order + 1)) as usize);
    let mut harmonics = Vec::with_capacity(coefficients.capacity());
    for l in 0..=order {
        for m in -(l as i32)..=(l as i32) {
            let c = if l == 0 {
                (4.0 * std::f64::consts::PI).sqrt() * radius.powi(3)
            } else {
                let g1 = rng.next_open01();
                let g2 = rng.next_open01();
                variance.sqrt()
                    * (-2.0 * g1.ln()).sqrt()
                    * (2.0 * std::f64::consts::PI * g2).cos()
            };
            coefficients.push(c);
            harmonics.push(SolidHarmonic::new(l, m));
        }
    }
    Ok(PerturbedSphereField {
        center: Vec3::zero(),
        order,
        coefficients,
        harmonics,
    })
}

impl PerturbedSphereField {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn offset(&self, x: Vec3) -> Vec3 {
        let d = x - self.center;
        assert!(
            d.norm() > 0.0,
            "singular evaluation point: perturbed sphere evaluated at its center"
        );
        d
    }
}

// lambda(x) = r^3 - sum c_lm Y_lm(x/r) with Y_lm(x/r) = S_lm(x) r^-l for the
// solid harmonic S_lm. All derivatives follow from the product rule on
// polynomial * r^-l; only the center is singular.
impl LevelSetField for PerturbedSphereField {
    fn value(&self, x: Vec3) -> f64 {
        let d = x - self.center;
        let r = d.norm();
        if r == 0.0 {
            // Every directional limit is -R(dir)^3 < 0; the spherically
            // averaged value keeps the center classified as interior.
            return -self.coefficients[0] / (4.0 * std::f64::consts::PI).sqrt();
        }
        let mut acc = r.powi(3);
        for (h, &c) in self.harmonics.iter().zip(&self.coefficients) {
            acc -= c * h.value(d) * r.powi(-(h.l as i32));
        }
        acc
    }

    fn gradient(&self, x: Vec3) -> Vec3 {
        let d = self.offset(x);
        let r = d.norm();
        let mut acc = d * (3.0 * r);
        for (h, &c) in self.harmonics.iter().zip(&self.coefficients) {
            let l = h.l as i32;
            let s = h.value(d);
            let gs = h.gradient(d);
            let term = gs * r.powi(-l) - d * (l as f64 * s * r.powi(-l - 2));
            acc -= term * c;
        }
        acc
    }

    fn hessian(&self, x: Vec3) -> Mat3 {
        let d = self.offset(x);
        let r = d.norm();
        let mut acc = Matrix3::identity() * (3.0 * r) + d.outer(d) * (3.0 / r);
        for (h, &c) in self.harmonics.iter().zip(&self.coefficients) {
            let l = h.l as i32;
            let lf = l as f64;
            let s = h.value(d);
            let gs = h.gradient(d);
            let hs = h.hessian(d);
            let term = hs * r.powi(-l)
                - (gs.outer(d) + d.outer(gs) + Matrix3::identity() * s)
                    * (lf * r.powi(-l - 2))
                + d.outer(d) * (lf * (lf + 2.0) * s * r.powi(-l - 4));
            acc = acc - term * c;
        }
        acc
    }
}
