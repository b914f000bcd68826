//! Axial and Radon frames of a single unit-perimeter curve.

use crate::curve::{unit_circle_radius, AffineCurve, AffineTransform, CurveSpec};
use crate::error::{Error, Result};
use crate::geometry::{det, Vec2};
use crate::orbits::radon_anchor_near;
use serde::Serialize;
use std::f64::consts::TAU;

/// Relative size of `k`-coefficients treated as zero (constant curvature).
const ISOTROPIC: f64 = 1e-9;
/// Relative odd part of `k` tolerated about a symmetry point.
const AXIS_TOL: f64 = 1e-8;
const CENTRAL_TOL: f64 = 1e-9;

/// A curve mapped into a normal frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    pub spec: CurveSpec,
    /// Parameter of the source curve that became `s = 0`.
    pub anchor: f64,
    /// Radon frame only: ordinate of `γ(s̄ + 1/4)`.
    pub landing: Option<f64>,
}

fn cyclic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// `max_k |Im(k̂_k e^{2πikc})|`: zero exactly when `k` is even about `c`.
fn odd_part(curve: &AffineCurve, c: f64) -> f64 {
    let k = curve.affine_curvature_series();
    (1..=k.bandwidth() as i64)
        .map(|m| (k.coefficient(m) * num_complex::Complex64::from_polar(1.0, TAU * m as f64 * c)).im.abs())
        .fold(0.0, f64::max)
}

/// Symmetry point of `k` nearest to `hint` (mod 1).
fn axis_point(curve: &AffineCurve, hint: f64) -> Result<f64> {
    let k = curve.affine_curvature_series();
    let scale = k.mean().abs();
    let (m, cm) = (1..=k.bandwidth() as i64)
        .map(|m| (m, k.coefficient(m)))
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap_or((1, num_complex::Complex64::new(0.0, 0.0)));
    if cm.norm() <= ISOTROPIC * scale {
        return Ok(hint.rem_euclid(1.0));
    }
    // k̂_m e^{2πimc} real: c ≡ −arg/(2πm) mod 1/(2m).
    let c0 = -cm.arg() / (TAU * m as f64);
    let step = 1.0 / (2 * m) as f64;
    let candidates: Vec<f64> = (0..2 * m).map(|j| (c0 + j as f64 * step).rem_euclid(1.0)).collect();
    let mut best: Option<(f64, f64)> = None;
    let mut worst_mismatch = f64::INFINITY;
    for &c in &candidates {
        let mismatch = odd_part(curve, c);
        worst_mismatch = worst_mismatch.min(mismatch);
        if mismatch <= AXIS_TOL * scale && best.is_none_or(|(b, _)| cyclic_distance(c, hint, 1.0) < cyclic_distance(b, hint, 1.0)) {
            best = Some((c, mismatch));
        }
    }
    best.map(|(c, _)| c).ok_or(Error::AxisNotFound {
        mismatch: worst_mismatch / scale,
    })
}

/// Translation then linear map sending `p ↦ 0`.
fn frame_transform(l: [[f64; 2]; 2], p: Vec2) -> AffineTransform {
    let lin = AffineTransform::linear(l);
    let lp = lin.apply_linear(p);
    AffineTransform {
        matrix: l,
        shift: [-lp.x, -lp.y],
    }
}

/// `diag(x, y) · [a b]^{-1}`.
fn columns_to_diag(a: Vec2, b: Vec2, x: f64, y: f64) -> [[f64; 2]; 2] {
    let d = det(a, b);
    [[x * b.y / d, -x * b.x / d], [-y * a.y / d, y * a.x / d]]
}

/// Marked point at the origin, auxiliary point at `(2R, 0)`, tangent at the
/// marked point vertical, through an area-preserving affine map.
///
/// The axis is found from the symmetry of the affine curvature. At the first
/// normalization (`hint` without a previous choice) the endpoint with larger
/// abscissa is marked; later calls keep the endpoint nearest to `hint`.
pub fn axial_frame(curve: &AffineCurve, hint: f64) -> Result<Frame> {
    let mut c = axis_point(curve, hint)?;
    let other = (c + 0.5).rem_euclid(1.0);
    if cyclic_distance(other, hint, 1.0) < cyclic_distance(c, hint, 1.0) {
        c = other;
    }
    let p = curve.point(c);
    let a = curve.point(c + 0.5) - p;
    let t = curve.tangent(c);
    let d = det(a, t);
    if !(d.is_finite() && d.abs() > 0.0) || a.norm() == 0.0 {
        return Err(Error::NonPositiveAuxiliary(a.norm()));
    }
    let r2 = 2.0 * unit_circle_radius();
    let l = columns_to_diag(a, t, r2, d / r2);
    let spec = curve
        .spec()
        .clone()
        .transformed(frame_transform(l, p))
        .with_phase(curve.spec().phase + c);
    Ok(Frame {
        spec,
        anchor: c,
        landing: None,
    })
}

/// First normalization of an axial curve: marks the axis endpoint with larger abscissa.
pub(crate) fn axial_marked_point(curve: &AffineCurve) -> Result<f64> {
    let c = axis_point(curve, 0.0)?;
    Ok(if curve.point(c + 0.5).x > curve.point(c).x {
        (c + 0.5).rem_euclid(1.0)
    } else {
        c
    })
}

/// Center of a centrally symmetric curve, `½(γ(0) + γ(½))`.
pub(crate) fn central_center(curve: &AffineCurve) -> Result<Vec2> {
    let center = 0.5 * (curve.point(0.0) + curve.point(0.5));
    let scale = (curve.point(0.0) - center).norm();
    let mismatch = (0..16)
        .map(|i| {
            let s = i as f64 / 32.0;
            (curve.point(s) + curve.point(s + 0.5) - 2.0 * center).norm()
        })
        .fold(0.0, f64::max);
    if mismatch > CENTRAL_TOL * scale {
        return Err(Error::NotCentral {
            mismatch: mismatch / scale,
        });
    }
    Ok(center)
}

/// Center at the origin, `γ(s̄) = (R, 0)`, `γ(s̄ + 1/4)` on the positive y-axis.
pub fn radon_frame(curve: &AffineCurve, hint: f64) -> Result<Frame> {
    let center = central_center(curve)?;
    let sbar = radon_anchor_near(curve, hint)?;
    let p1 = curve.point(sbar) - center;
    let p2 = curve.point(sbar + 0.25) - center;
    let r = unit_circle_radius();
    let y = det(p1, p2) / r;
    if !(y > 0.0) {
        return Err(Error::NonPositiveAuxiliary(y));
    }
    let l = columns_to_diag(p1, p2, r, y);
    let spec = curve
        .spec()
        .clone()
        .transformed(frame_transform(l, center))
        .with_phase(curve.spec().phase + sbar);
    Ok(Frame {
        spec,
        anchor: sbar,
        landing: Some(y),
    })
}
