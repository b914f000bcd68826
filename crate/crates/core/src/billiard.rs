//! The symplectic billiard map and its generating function.
//!
//! For boundary points `x < y < x*` the map sends `(x, y)` to `(y, z)` where
//! the chord `z − x` is parallel to the tangent at `y`. Parameters are affine
//! arc length on `[0, 1)`; a phase point keeps `y` unwrapped so `0 < y − x < 1`.

use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::geometry::det;
use crate::roots;

/// Points closer than this (in affine parameter) to the diagonal are rejected.
pub const MIN_SEPARATION: f64 = 1e-6;

const COARSE: f64 = 1e-3;
const FINE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    /// Normalizes `x` into `[0, 1)` and `y` to the following turn.
    pub fn new(x: f64, y: f64) -> Self {
        let mut xn = x.rem_euclid(1.0);
        if xn >= 1.0 {
            xn = 0.0;
        }
        Self {
            x: xn,
            y: xn + (y - x).rem_euclid(1.0),
        }
    }
}

/// `ω(γ(x), γ(y))`.
pub fn generating_action(curve: &AffineCurve, x: f64, y: f64) -> f64 {
    det(curve.point(x), curve.point(y))
}

/// `det(γ(next) − γ(prev), γ'(cur))`: zero exactly for billiard configurations.
pub fn reflection_residual(curve: &AffineCurve, prev: f64, cur: f64, next: f64) -> f64 {
    det(curve.point(next) - curve.point(prev), curve.tangent(cur))
}

/// Checks `x < y < x*` with margin and returns the opposite point of `y`.
fn admissible(curve: &AffineCurve, p: PhasePoint) -> Result<f64> {
    let outside = |sep: f64| Error::OutsidePhaseSpace {
        x: p.x,
        y: p.y,
        separation: sep,
    };
    let gap = p.y - p.x;
    if gap <= MIN_SEPARATION {
        return Err(outside(gap));
    }
    let x_star = curve.opposite_point(p.x)?;
    if x_star - p.y <= MIN_SEPARATION {
        return Err(outside(x_star - p.y));
    }
    curve.opposite_point(p.y)
}

/// One application of the billiard map.
pub fn step(curve: &AffineCurve, p: PhasePoint) -> Result<PhasePoint> {
    let p = PhasePoint::new(p.x, p.y);
    let y_star = admissible(curve, p)?;
    let gx = curve.point(p.x);
    let ty = curve.tangent(p.y);
    let z = roots::bracketed(
        |z| det(curve.point(z) - gx, ty),
        |z| det(curve.tangent(z), ty),
        p.y,
        y_star,
        COARSE,
        FINE,
        "billiard step",
    )?;
    Ok(PhasePoint::new(p.y, z))
}

/// Inverse of [`step`].
pub fn step_back(curve: &AffineCurve, p: PhasePoint) -> Result<PhasePoint> {
    let p = PhasePoint::new(p.x, p.y);
    // (x, y) = (y_prev, z_prev); search the predecessor in (x* − 1, x).
    let gap = p.y - p.x;
    let x_star = curve.opposite_point(p.x)?;
    if gap <= MIN_SEPARATION || x_star - p.y <= MIN_SEPARATION {
        return Err(Error::OutsidePhaseSpace {
            x: p.x,
            y: p.y,
            separation: gap.min(x_star - p.y),
        });
    }
    let gz = curve.point(p.y);
    let tx = curve.tangent(p.x);
    let w = roots::bracketed(
        |w| det(gz - curve.point(w), tx),
        |w| -det(curve.tangent(w), tx),
        x_star - 1.0,
        p.x,
        COARSE,
        FINE,
        "billiard step back",
    )?;
    Ok(PhasePoint::new(w, p.x))
}
