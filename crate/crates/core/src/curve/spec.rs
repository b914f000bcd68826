//! Analytic boundary generators.

use crate::error::{Error, Result};
use crate::geometry::{det, Vec2};
use crate::trig::TrigSeries;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

/// Affine map `p ↦ matrix·p + shift` applied to the generator before sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineTransform {
    pub matrix: [[f64; 2]; 2],
    #[serde(default)]
    pub shift: [f64; 2],
}

impl AffineTransform {
    pub fn identity() -> Self {
        Self::linear([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn linear(matrix: [[f64; 2]; 2]) -> Self {
        Self {
            matrix,
            shift: [0.0, 0.0],
        }
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::linear([[c, -s], [s, c]])
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[inline]
    pub fn apply_linear(&self, v: Vec2) -> Vec2 {
        let m = &self.matrix;
        Vec2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.apply_linear(p) + Vec2::new(self.shift[0], self.shift[1])
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineTransform) -> Self {
        let a = &self.matrix;
        let b = &inner.matrix;
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let t = self.apply(Vec2::new(inner.shift[0], inner.shift[1]));
        Self {
            matrix: m,
            shift: [t.x, t.y],
        }
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            matrix: self.matrix,
            shift: [c * self.shift[0], c * self.shift[1]],
        }
    }
}

/// Base shape before the affine pre-transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `r(θ) = R0 (1 + Σ cos[m-1] cos mθ + sin[m-1] sin mθ)`.
    RadialFourier {
        #[serde(rename = "R0")]
        r0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

/// A convex boundary given by an analytic generator `θ ↦ P(θ)`, θ ∈ [0, 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<AffineTransform>,
    /// Offset of the affine parameter origin: the built curve starts at `s = phase`.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub phase: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// Number of θ samples used for convexity checks and perimeter quadrature.
const THETA_SAMPLES: usize = 2048;

/// Radius of the circle with unit affine perimeter, `(2π)^{-3/2}`.
pub fn unit_circle_radius() -> f64 {
    TAU.powf(-1.5)
}

impl CurveSpec {
    pub fn ellipse(a: f64, b: f64) -> Self {
        Self {
            shape: Shape::Ellipse { a, b },
            transform: None,
            phase: 0.0,
        }
    }

    pub fn circle(r: f64) -> Self {
        Self::radial(r, vec![], vec![])
    }

    /// The circle of unit affine perimeter.
    pub fn unit_circle() -> Self {
        Self::circle(unit_circle_radius())
    }

    pub fn radial(r0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self {
            shape: Shape::RadialFourier { r0, cos, sin },
            transform: None,
            phase: 0.0,
        }
    }

    /// Pre-composes with another affine map (applied after any existing one).
    pub fn transformed(mut self, t: AffineTransform) -> Self {
        self.transform = Some(match self.transform {
            Some(inner) => t.compose(&inner),
            None => t,
        });
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Parameter sanity plus strict convexity on a dense θ grid.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match &self.shape {
            Shape::Ellipse { a, b } => {
                if !(finite(*a) && finite(*b) && *a > 0.0 && *b > 0.0) {
                    return Err(Error::InvalidSpec(format!("semi-axes must be positive, got a = {a}, b = {b}")));
                }
            }
            Shape::RadialFourier { r0, cos, sin } => {
                if !(finite(*r0) && *r0 > 0.0) {
                    return Err(Error::InvalidSpec(format!("R0 must be positive, got {r0}")));
                }
                if !cos.iter().chain(sin).all(|v| finite(*v)) {
                    return Err(Error::InvalidSpec("non-finite Fourier coefficient".into()));
                }
            }
        }
        if let Some(t) = &self.transform {
            let d = t.determinant();
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "transform must preserve orientation (determinant {d})"
                )));
            }
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidSpec("phase must be finite".into()));
        }
        self.check_convex()
    }

    fn check_convex(&self) -> Result<()> {
        let mut worst = (0.0, f64::INFINITY);
        for j in 0..THETA_SAMPLES {
            let th = TAU * j as f64 / THETA_SAMPLES as f64;
            if let Shape::RadialFourier { .. } = self.shape {
                let r = self.radius(th)[0];
                if r <= 0.0 {
                    return Err(Error::NonConvex { theta: th, value: r });
                }
            }
            let j = self.jet(th);
            let d = det(j[1], j[2]);
            if d < worst.1 {
                worst = (th, d);
            }
        }
        if worst.1 <= 0.0 {
            return Err(Error::NonConvex {
                theta: worst.0,
                value: worst.1,
            });
        }
        Ok(())
    }

    /// `r` and its first four θ-derivatives for radial specs.
    fn radius(&self, th: f64) -> [f64; 5] {
        let Shape::RadialFourier { r0, cos, sin } = &self.shape else {
            unreachable!("radius of a non-radial spec")
        };
        let mut r = [1.0, 0.0, 0.0, 0.0, 0.0];
        let modes = cos.len().max(sin.len());
        for m in 1..=modes {
            let ec = cos.get(m - 1).copied().unwrap_or(0.0);
            let es = sin.get(m - 1).copied().unwrap_or(0.0);
            if ec == 0.0 && es == 0.0 {
                continue;
            }
            let mf = m as f64;
            let (s, c) = (mf * th).sin_cos();
            let v = ec * c + es * s;
            let dv = mf * (es * c - ec * s);
            r[0] += v;
            r[1] += dv;
            r[2] -= mf * mf * v;
            r[3] -= mf * mf * dv;
            r[4] += mf.powi(4) * v;
        }
        r.map(|v| v * r0)
    }

    /// `P` and its first four θ-derivatives, transform included.
    pub fn jet(&self, th: f64) -> [Vec2; 5] {
        let (s, c) = th.sin_cos();
        let raw = match &self.shape {
            Shape::Ellipse { a, b } => [
                Vec2::new(a * c, b * s),
                Vec2::new(-a * s, b * c),
                Vec2::new(-a * c, -b * s),
                Vec2::new(a * s, -b * c),
                Vec2::new(a * c, b * s),
            ],
            Shape::RadialFourier { .. } => {
                let r = self.radius(th);
                let u = Vec2::new(c, s);
                let n = Vec2::new(-s, c);
                [
                    r[0] * u,
                    r[1] * u + r[0] * n,
                    (r[2] - r[0]) * u + 2.0 * r[1] * n,
                    (r[3] - 3.0 * r[1]) * u + (3.0 * r[2] - r[0]) * n,
                    (r[4] - 6.0 * r[2] + r[0]) * u + 4.0 * (r[3] - r[1]) * n,
                ]
            }
        };
        match &self.transform {
            None => raw,
            Some(t) => [
                t.apply(raw[0]),
                t.apply_linear(raw[1]),
                t.apply_linear(raw[2]),
                t.apply_linear(raw[3]),
                t.apply_linear(raw[4]),
            ],
        }
    }

    pub fn point(&self, th: f64) -> Vec2 {
        self.jet(th)[0]
    }

    /// Affine arc-length density `det(P', P'')^{1/3}` in θ.
    pub fn affine_density(&self, th: f64) -> f64 {
        let j = self.jet(th);
        det(j[1], j[2]).max(0.0).cbrt()
    }

    /// Euclidean radius of curvature `|P'|³ / det(P', P'')`.
    pub fn curvature_radius(&self, th: f64) -> f64 {
        let j = self.jet(th);
        j[1].norm().powi(3) / det(j[1], j[2])
    }

    /// Affine curvature at θ for the parametrization by affine arc length
    /// scaled to total length `lambda`.
    pub fn affine_curvature(&self, th: f64, lambda: f64) -> f64 {
        let p = self.jet(th);
        let d = det(p[1], p[2]);
        let e = det(p[1], p[3]);
        let f = det(p[2], p[3]);
        let de = f + det(p[1], p[4]);
        // φ = dθ/ds and its θ-derivatives.
        let phi = lambda * d.powf(-1.0 / 3.0);
        let phi1 = -lambda / 3.0 * d.powf(-4.0 / 3.0) * e;
        let phi2 = lambda * (4.0 / 9.0 * d.powf(-7.0 / 3.0) * e * e - d.powf(-4.0 / 3.0) * de / 3.0);
        phi.powi(5) * f + phi.powi(4) * phi1 * e + phi.powi(3) * d * (2.0 * phi1 * phi1 - phi * phi2)
    }

    /// Density of the affine arc length as a 1-periodic series in `θ / 2π`.
    pub(crate) fn density_series(&self, n: usize) -> TrigSeries {
        TrigSeries::from_fn(n, |t| self.affine_density(TAU * t))
    }

    /// Total affine arc length `∫ κ^{1/3} dt`.
    pub fn affine_perimeter(&self) -> Result<f64> {
        self.validate()?;
        Ok(TAU * self.density_series(THETA_SAMPLES).mean())
    }

    /// Uniform dilation (about the origin) to unit affine perimeter.
    pub fn normalize_unit_perimeter(&self) -> Result<Self> {
        let lambda = self.affine_perimeter()?;
        if (lambda - 1.0).abs() <= 1e-14 {
            return Ok(self.clone());
        }
        Ok(self.dilated(lambda.powf(-1.5)))
    }

    /// The same curve scaled by `c` about the origin.
    pub fn dilated(&self, c: f64) -> Self {
        let shape = match &self.shape {
            Shape::Ellipse { a, b } => Shape::Ellipse { a: c * a, b: c * b },
            Shape::RadialFourier { r0, cos, sin } => Shape::RadialFourier {
                r0: c * r0,
                cos: cos.clone(),
                sin: sin.clone(),
            },
        };
        Self {
            shape,
            transform: self.transform.map(|t| t.scaled(c)),
            phase: self.phase,
        }
    }
}
