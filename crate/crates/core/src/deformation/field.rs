//! The `τ`-velocity of a family and the deformation function `n = ω(∂_τγ, T)`.

use super::DomainFamily;
use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::geometry::{det, Vec2};
use nalgebra::Matrix2;

/// Default step of the `τ` central differences.
pub const DEFAULT_H_TAU: f64 = 1e-4;

enum Velocity {
    /// `∂_τγ = M A(τ)^{-1}(γ − cτb) + cb`.
    Analytic {
        m: Matrix2<f64>,
        a_inv: Matrix2<f64>,
        offset: Vec2,
        cb: Vec2,
    },
    /// Members at `τ ± h` and `τ ± h/2`.
    Differences {
        h: f64,
        plus: [AffineCurve; 2],
        minus: [AffineCurve; 2],
    },
}

/// Normalized member at `τ` together with its `τ`-velocity.
pub struct DeformationField {
    curve: AffineCurve,
    velocity: Velocity,
}

impl DeformationField {
    /// Uses the closed form when the family allows it, else Richardson-refined
    /// central differences with step `h`.
    pub fn new(family: &DomainFamily, tau: f64, h: f64, n: usize) -> Result<Self> {
        let curve = family.curve_at(tau, n)?;
        let velocity = if family.analytic_velocity() {
            let raw = family.raw_spec(tau)?;
            let lambda = raw.affine_perimeter()?;
            let c = if (lambda - 1.0).abs() <= 1e-14 { 1.0 } else { lambda.powf(-1.5) };
            let (m, b) = match &family.affine_motion {
                Some(mo) => (mo.matrix, mo.shift),
                None => ([[0.0; 2]; 2], [0.0; 2]),
            };
            let m = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
            let a = Matrix2::identity() + tau * m;
            let a_inv = a.try_inverse().ok_or_else(|| Error::InvalidSpec("singular affine motion".into()))?;
            let cb = c * Vec2::new(b[0], b[1]);
            Velocity::Analytic {
                m,
                a_inv,
                offset: tau * cb,
                cb,
            }
        } else {
            if !(h > 0.0) || !family.contains(tau - h) || !family.contains(tau + h) {
                return Err(Error::InvalidArgument(format!(
                    "tau = {tau} with step {h} leaves the family range [{}, {}]",
                    family.tau_range[0], family.tau_range[1]
                )));
            }
            let at = |t: f64| family.curve_at(t, n);
            Velocity::Differences {
                h,
                plus: [at(tau + h)?, at(tau + 0.5 * h)?],
                minus: [at(tau - h)?, at(tau - 0.5 * h)?],
            }
        };
        Ok(Self { curve, velocity })
    }

    pub fn curve(&self) -> &AffineCurve {
        &self.curve
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.velocity, Velocity::Analytic { .. })
    }

    /// `∂_τγ(τ, s)`.
    pub fn velocity(&self, s: f64) -> Vec2 {
        match &self.velocity {
            Velocity::Analytic { m, a_inv, offset, cb } => m * (a_inv * (self.curve.point(s) - offset)) + cb,
            Velocity::Differences { h, plus, minus } => {
                let d1 = (plus[0].point(s) - minus[0].point(s)) / (2.0 * *h);
                let d2 = (plus[1].point(s) - minus[1].point(s)) / *h;
                (4.0 * d2 - d1) / 3.0
            }
        }
    }

    /// `n(s) = ω(∂_τγ, T)` with `T` the unit tangent.
    pub fn n(&self, s: f64) -> f64 {
        det(self.velocity(s), self.curve.tangent(s).normalize())
    }

    /// `u(s) = n(s) ρ(s)^{1/3}`, i.e. `ω(∂_τγ, γ')`.
    pub fn u(&self, s: f64) -> f64 {
        det(self.velocity(s), self.curve.tangent(s))
    }

    pub fn u_samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.u(i as f64 / n as f64)).collect()
    }
}

/// `n(τ, s)`; builds the field, so prefer [`DeformationField`] for many `s`.
pub fn deformation_function(family: &DomainFamily, tau: f64, s: f64, n: usize) -> Result<f64> {
    Ok(DeformationField::new(family, tau, DEFAULT_H_TAU, n)?.n(s))
}

/// `u(τ, s) = n(τ, s) ρ^{1/3}`.
pub fn weight_u(family: &DomainFamily, tau: f64, s: f64, n: usize) -> Result<f64> {
    Ok(DeformationField::new(family, tau, DEFAULT_H_TAU, n)?.u(s))
}
