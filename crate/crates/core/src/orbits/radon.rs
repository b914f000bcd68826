//! Four-periodic orbits of centrally symmetric curves and integrability probes.

use super::{maximize_central_with, maximize_free_with, SolverOptions};
use crate::billiard::reflection_residual;
use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::geometry::det;
use crate::roots;
use rayon::prelude::*;
use serde::Serialize;

/// Largest tolerated residual of the completing reflection in a 4-orbit.
pub const RADON_TOL: f64 = 1e-9;

/// The 4-configuration `{s, φ, s+1/2, φ+1/2}` through `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourOrbit {
    pub s: f64,
    pub phi: f64,
    /// `det(γ(φ+1/2) − γ(φ), γ'(s))`; zero when the configuration reflects at `s`.
    pub radon_residual: f64,
}

/// Solves for `φ ∈ (s, s+1/2)` with tangent parallel to the diagonal `γ(s+1/2) − γ(s)`.
pub fn four_orbit_residual(curve: &AffineCurve, s: f64) -> Result<FourOrbit> {
    let diag = curve.point(s + 0.5) - curve.point(s);
    let phi = roots::bracketed(
        |x| det(diag, curve.tangent(x)),
        |x| det(diag, curve.derivative(x, 2)),
        s,
        s + 0.5,
        1e-3,
        1e-15,
        "four-orbit partner",
    )?;
    let radon_residual = det(curve.point(phi + 0.5) - curve.point(phi), curve.tangent(s));
    Ok(FourOrbit { s, phi, radon_residual })
}

/// `φ(s)`, failing when the configuration through `s` does not close up.
pub fn four_orbit_map(curve: &AffineCurve, s: f64) -> Result<f64> {
    let f = four_orbit_residual(curve, s)?;
    if f.radon_residual.abs() > RADON_TOL {
        return Err(Error::NotRadon {
            s,
            residual: f.radon_residual,
        });
    }
    Ok(f.phi)
}

const ANCHOR_GRID: usize = 64;
const ANCHOR_ZERO: f64 = 1e-10;

fn anchor_gap(curve: &AffineCurve, s: f64) -> Result<f64> {
    Ok(four_orbit_residual(curve, s)?.phi - s - 0.25)
}

/// Refines a sign change of `g` on `[lo, hi]` by bisection.
fn refine(curve: &AffineCurve, mut lo: f64, mut hi: f64, glo: f64) -> Result<f64> {
    let mut glo = glo;
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        let g = anchor_gap(curve, mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == glo.signum() {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn validate_anchor(curve: &AffineCurve, s: f64) -> Result<f64> {
    let params = [s, s + 0.25, s + 0.5, s + 0.75];
    let worst = (0..4)
        .map(|j| {
            let prev = if j == 0 { params[3] - 1.0 } else { params[j - 1] };
            let next = if j == 3 { params[0] + 1.0 } else { params[j + 1] };
            reflection_residual(curve, prev, params[j], next).abs()
        })
        .fold(0.0, f64::max);
    if worst > RADON_TOL {
        return Err(Error::NotRadon { s, residual: worst });
    }
    Ok(s)
}

/// Smallest `s̄ ∈ [0, 1/2)` with `φ(s̄) = s̄ + 1/4`.
pub fn radon_anchor(curve: &AffineCurve) -> Result<f64> {
    let grid: Vec<f64> = (0..=ANCHOR_GRID).map(|i| 0.5 * i as f64 / ANCHOR_GRID as f64).collect();
    let mut prev = (grid[0], anchor_gap(curve, grid[0])?);
    if prev.1.abs() <= ANCHOR_ZERO {
        return validate_anchor(curve, prev.0);
    }
    for &s in &grid[1..] {
        let g = anchor_gap(curve, s)?;
        if g.abs() <= ANCHOR_ZERO {
            return validate_anchor(curve, s);
        }
        if g.signum() != prev.1.signum() {
            let root = refine(curve, prev.0, s, prev.1)?;
            return validate_anchor(curve, root);
        }
        prev = (s, g);
    }
    Err(Error::NotRadon {
        s: 0.0,
        residual: prev.1,
    })
}

/// Like [`radon_anchor`], but takes the crossing nearest to `hint` (mod 1/2).
pub fn radon_anchor_near(curve: &AffineCurve, hint: f64) -> Result<f64> {
    let hint = hint.rem_euclid(0.5);
    let grid: Vec<f64> = (0..=ANCHOR_GRID).map(|i| 0.5 * i as f64 / ANCHOR_GRID as f64).collect();
    let gaps = grid
        .iter()
        .map(|&s| anchor_gap(curve, s))
        .collect::<Result<Vec<_>>>()?;
    let dist = |s: f64| {
        let d = (s - hint).rem_euclid(0.5);
        d.min(0.5 - d)
    };
    let mut best: Option<f64> = None;
    let mut consider = |s: f64| {
        if best.is_none_or(|b| dist(s) < dist(b)) {
            best = Some(s);
        }
    };
    for i in 0..ANCHOR_GRID {
        let (a, b) = (gaps[i], gaps[i + 1]);
        if a.abs() <= ANCHOR_ZERO {
            consider(grid[i]);
        } else if b.abs() > ANCHOR_ZERO && a.signum() != b.signum() {
            consider(refine(curve, grid[i], grid[i + 1], a)?);
        }
    }
    match best {
        Some(s) => validate_anchor(curve, s),
        None => Err(Error::NotRadon {
            s: hint,
            residual: gaps[0],
        }),
    }
}

pub const PROBE_PINS: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub q: usize,
    pub central_action: f64,
    /// `(pin, action)` for every pin whose search converged.
    pub pinned: Vec<(f64, f64)>,
    /// `(pin, error)` for pins whose search failed.
    pub failures: Vec<(f64, String)>,
    /// `max |action(pin) − central_action|`.
    pub max_deviation: f64,
}

/// Compares pinned free maximizers on a grid of starts with the central maximizer.
pub fn integrability_probe(curve: &AffineCurve, q: usize, opts: &SolverOptions) -> Result<ProbeReport> {
    let central = maximize_central_with(curve, q, opts)?;
    let results: Vec<(f64, Result<f64>)> = (0..PROBE_PINS)
        .into_par_iter()
        .map(|i| {
            let pin = i as f64 / PROBE_PINS as f64;
            (pin, maximize_free_with(curve, q, Some(pin), opts).map(|o| o.action))
        })
        .collect();
    let mut pinned = Vec::new();
    let mut failures = Vec::new();
    for (pin, r) in results {
        match r {
            Ok(a) => pinned.push((pin, a)),
            Err(e) => {
                log::warn!("integrability probe q = {q}, pin {pin}: {e}");
                failures.push((pin, e.to_string()));
            }
        }
    }
    if pinned.is_empty() {
        return Err(Error::Stagnation {
            q,
            iterations: 0,
            residual: f64::NAN,
            params: vec![],
        });
    }
    let max_deviation = pinned
        .iter()
        .map(|(_, a)| (a - central.action).abs())
        .fold(0.0, f64::max);
    Ok(ProbeReport {
        q,
        central_action: central.action,
        pinned,
        failures,
        max_deviation,
    })
}
