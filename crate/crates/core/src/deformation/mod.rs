//! One-parameter families of domains, their normalizations, and the
//! identities satisfied by the infinitesimal deformation function.
//!
//! A [`DomainFamily`] moves the radial Fourier coefficients of a base curve
//! linearly in `τ` and may additionally apply an affine motion
//! `p ↦ (I + τM)p + τb`. Every member is rescaled to unit affine perimeter
//! and, for normalized families, mapped into the axial or Radon frame.

mod field;
mod fourier;
mod frame;
mod rigidity;

pub use field::{deformation_function, weight_u, DeformationField, DEFAULT_H_TAU};
pub use fourier::{circle_mode_identity, fourier_coeffs, FourierSeries, ALIASING_TOL};
pub use frame::{axial_frame, radon_frame, Frame};
pub use rigidity::{isospectral_residual, rigidity_row, rigidity_rows, spectral_sum, EnvelopeCheck, RigidityRow};

use crate::curve::{AffineCurve, AffineTransform, CurveSpec, Shape};
use crate::error::{Error, Result};
use crate::orbits::{radon_anchor, OrbitClass};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Largest tolerated `τ`-variation of the Radon y-landing for isospectral families.
pub const LANDING_TOL: f64 = 1e-8;

/// Number of `τ` values on which a normalization is validated.
const CHECK_TAUS: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeVelocities {
    #[serde(default, rename = "R0")]
    pub r0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl ModeVelocities {
    pub fn is_zero(&self) -> bool {
        self.r0 == 0.0 && self.cos.iter().chain(&self.sin).all(|v| *v == 0.0)
    }
}

/// `A(τ) = I + τ·matrix`, translation `τ·shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMotion {
    pub matrix: [[f64; 2]; 2],
    #[serde(default)]
    pub shift: [f64; 2],
}

impl AffineMotion {
    pub fn at(&self, tau: f64) -> AffineTransform {
        let m = &self.matrix;
        AffineTransform {
            matrix: [[1.0 + tau * m[0][0], tau * m[0][1]], [tau * m[1][0], 1.0 + tau * m[1][1]]],
            shift: [tau * self.shift[0], tau * self.shift[1]],
        }
    }

    /// `det(I + τM) ≡ 1`.
    pub fn is_unimodular(&self) -> bool {
        let m = &self.matrix;
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        tr.abs() <= 1e-15 && det.abs() <= 1e-15
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilySymmetry {
    Axial,
    Central,
}

impl FamilySymmetry {
    pub fn orbit_class(self) -> OrbitClass {
        match self {
            Self::Axial => OrbitClass::Axial,
            Self::Central => OrbitClass::Central,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    None,
    Axial,
    Radon,
}

fn default_tau_range() -> [f64; 2] {
    [-1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFamily {
    pub base: CurveSpec,
    #[serde(default)]
    pub mode_velocities: ModeVelocities,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine_motion: Option<AffineMotion>,
    pub symmetry: FamilySymmetry,
    #[serde(default = "default_tau_range")]
    pub tau_range: [f64; 2],
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub isospectral: bool,
    /// Parameter of the marked point (axial) or anchor (Radon) at the base `τ`;
    /// members are normalized at the candidate nearest to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
}

impl DomainFamily {
    pub fn new(base: CurveSpec, symmetry: FamilySymmetry) -> Self {
        Self {
            base,
            mode_velocities: ModeVelocities::default(),
            affine_motion: None,
            symmetry,
            tau_range: default_tau_range(),
            normalization: Normalization::None,
            isospectral: false,
            anchor: None,
        }
    }

    pub fn with_velocities(mut self, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        self.mode_velocities.cos = cos;
        self.mode_velocities.sin = sin;
        self
    }

    pub fn with_motion(mut self, matrix: [[f64; 2]; 2], shift: [f64; 2]) -> Self {
        self.affine_motion = Some(AffineMotion { matrix, shift });
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let fam: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        fam.validate()?;
        Ok(fam)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.tau_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSpec(format!("bad tau range [{lo}, {hi}]")));
        }
        if !self.mode_velocities.is_zero() && !matches!(self.base.shape, Shape::RadialFourier { .. }) {
            return Err(Error::InvalidSpec("mode velocities need a radial-fourier base".into()));
        }
        self.base.validate()
    }

    /// `0` clamped into the `τ`-range.
    pub fn base_tau(&self) -> f64 {
        0.0f64.clamp(self.tau_range[0], self.tau_range[1])
    }

    pub fn contains(&self, tau: f64) -> bool {
        let slack = 1e-12 * (self.tau_range[1] - self.tau_range[0]);
        tau >= self.tau_range[0] - slack && tau <= self.tau_range[1] + slack
    }

    /// Whether `∂_τγ` has a closed form: an area-preserving affine motion and nothing else.
    pub fn analytic_velocity(&self) -> bool {
        self.mode_velocities.is_zero()
            && self.normalization == Normalization::None
            && self.affine_motion.is_none_or(|m| m.is_unimodular())
    }

    /// The member at `τ` before any rescaling.
    pub fn raw_spec(&self, tau: f64) -> Result<CurveSpec> {
        if !self.contains(tau) {
            return Err(Error::InvalidArgument(format!(
                "tau = {tau} is outside [{}, {}]",
                self.tau_range[0], self.tau_range[1]
            )));
        }
        let mut spec = self.base.clone();
        if !self.mode_velocities.is_zero() {
            let Shape::RadialFourier { r0, cos, sin } = &mut spec.shape else {
                return Err(Error::InvalidSpec("mode velocities need a radial-fourier base".into()));
            };
            let v = &self.mode_velocities;
            *r0 += tau * v.r0;
            add_scaled(cos, &v.cos, tau);
            add_scaled(sin, &v.sin, tau);
        }
        if let Some(m) = &self.affine_motion {
            spec = spec.transformed(m.at(tau));
        }
        Ok(spec)
    }

    /// The member at `τ` at unit affine perimeter, in the family's frame.
    pub fn spec_at(&self, tau: f64, n: usize) -> Result<CurveSpec> {
        Ok(self.frame_at(tau, n)?.spec)
    }

    pub fn frame_at(&self, tau: f64, n: usize) -> Result<Frame> {
        let unit = self.raw_spec(tau)?.normalize_unit_perimeter()?;
        match self.normalization {
            Normalization::None => Ok(Frame {
                spec: unit,
                anchor: 0.0,
                landing: None,
            }),
            Normalization::Axial => {
                let curve = AffineCurve::build(&unit, n)?;
                let hint = match self.anchor {
                    Some(a) => a,
                    None => frame::axial_marked_point(&curve)?,
                };
                axial_frame(&curve, hint)
            }
            Normalization::Radon => {
                let curve = AffineCurve::build(&unit, n)?;
                let hint = match self.anchor {
                    Some(a) => a,
                    None => {
                        frame::central_center(&curve)?;
                        radon_anchor(&curve)?
                    }
                };
                radon_frame(&curve, hint)
            }
        }
    }

    pub fn curve_at(&self, tau: f64, n: usize) -> Result<AffineCurve> {
        AffineCurve::build(&self.spec_at(tau, n)?, n)
    }

    fn check_taus(&self) -> Vec<f64> {
        let [lo, hi] = self.tau_range;
        (0..CHECK_TAUS)
            .map(|i| lo + (hi - lo) * i as f64 / (CHECK_TAUS - 1) as f64)
            .collect()
    }
}

fn add_scaled(target: &mut Vec<f64>, v: &[f64], tau: f64) {
    if target.len() < v.len() {
        target.resize(v.len(), 0.0);
    }
    for (t, dv) in target.iter_mut().zip(v) {
        *t += tau * dv;
    }
}

/// Resolves the marked point at the base `τ` and checks the axial frame exists on the range.
pub fn normalize_axial_family(family: &DomainFamily, n: usize) -> Result<DomainFamily> {
    family.validate()?;
    let mut out = family.clone();
    out.normalization = Normalization::Axial;
    out.anchor = None;
    let base = out.frame_at(out.base_tau(), n)?;
    out.anchor = Some(base.anchor);
    for tau in out.check_taus() {
        out.frame_at(tau, n)?;
    }
    Ok(out)
}

/// Per-`τ` y-landing of `γ(s̄ + 1/4)` in the Radon frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandingReport {
    pub taus: Vec<f64>,
    pub landing: Vec<f64>,
    /// `max − min` of the landings.
    pub variation: f64,
}

/// Resolves the Radon anchor at the base `τ` and records the y-landing on the range.
pub fn normalize_radon_family(family: &DomainFamily, n: usize) -> Result<(DomainFamily, LandingReport)> {
    family.validate()?;
    let mut out = family.clone();
    out.normalization = Normalization::Radon;
    out.anchor = None;
    let base = out.frame_at(out.base_tau(), n)?;
    out.anchor = Some(base.anchor);
    let taus = out.check_taus();
    let landing = taus
        .iter()
        .map(|&t| Ok(out.frame_at(t, n)?.landing.unwrap_or(f64::NAN)))
        .collect::<Result<Vec<_>>>()?;
    let max = landing.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = landing.iter().cloned().fold(f64::INFINITY, f64::min);
    let variation = max - min;
    if out.isospectral && variation > LANDING_TOL {
        return Err(Error::IsospectralViolation { variation });
    }
    Ok((out, LandingReport { taus, landing, variation }))
}
