//! Asymptotic predictions for the vertices, spacings and chords of maximizing
//! `q`-orbits, and the measured order of their remainders.
//!
//! All predictions are in terms of the affine curvature `k` of a
//! unit-perimeter curve and its integral `K = ∫_0^1 k`.

use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::orbits::{maximize_axial_with, SolverOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Residuals below this are indistinguishable from the parameter accuracy of
/// a polished orbit and are left out of slope fits.
pub const NOISE_FLOOR: f64 = 1e-14;

/// Largest `circle_distance` for which the expansions are expected to hold.
pub const DELTA_SMALL: f64 = 0.05;

/// Largest reflection residual of an orbit used as a measurement.
pub const MEASUREMENT_TOL: f64 = 1e-10;

/// `λ_j = s_j − s_{j−1}` up to `O(1/q⁵)`.
pub fn predict_lambda(curve: &AffineCurve, q: usize, j: usize) -> f64 {
    let qf = q as f64;
    let x = j as f64 / qf;
    let kbar = curve.mean_affine_curvature();
    1.0 / qf - kbar / (30.0 * qf.powi(3)) + curve.affine_curvature(x) / (30.0 * qf.powi(3))
        - curve.affine_curvature_derivative(x) / (60.0 * qf.powi(4))
}

/// `s_j` of the orbit starting at `s0`, up to `O(1/q⁴)`.
pub fn predict_s(curve: &AffineCurve, q: usize, j: usize, s0: f64) -> f64 {
    let qf = q as f64;
    let x = j as f64 / qf;
    let kint = curve.affine_curvature_integral(s0 + x) - curve.affine_curvature_integral(s0);
    s0 + x + kint / (30.0 * qf * qf) - j as f64 * curve.mean_affine_curvature() / (30.0 * qf.powi(3))
}

/// Chord `‖γ(s_{j+1}) − γ(s_{j−1})‖`, with `k` and `ρ` taken at the predicted `s_j`.
pub fn predict_chord(curve: &AffineCurve, q: usize, j: usize) -> f64 {
    let qf = q as f64;
    let sj = predict_s(curve, q, j, 0.0);
    let k = curve.affine_curvature(sj);
    let kbar = curve.mean_affine_curvature();
    let bracket = 2.0 / qf + (k - kbar) / (15.0 * qf.powi(3)) - k / (3.0 * qf.powi(3));
    curve.curvature_radius(sj).cbrt() * bracket
}

/// Same chord with the curvature frozen at `j/q`, grouped through [`beta_fn`].
pub fn predict_chord_regrouped(curve: &AffineCurve, q: usize, j: usize) -> f64 {
    let qf = q as f64;
    let sj = predict_s(curve, q, j, 0.0);
    let bracket = chord_bracket(curve, q, j as f64 / qf);
    curve.curvature_radius(sj).cbrt() * bracket
}

/// `2/q − (2π)²/(3q³) + β(x)/q³`.
pub(crate) fn chord_bracket(curve: &AffineCurve, q: usize, x: f64) -> f64 {
    let qf = q as f64;
    2.0 / qf - TAU * TAU / (3.0 * qf.powi(3)) + beta_fn(curve, x) / qf.powi(3)
}

/// `α(x) = (1/30)∫_0^x k − (x/30)∫_0^1 k`; odd and 1-periodic.
pub fn alpha_fn(curve: &AffineCurve, x: f64) -> f64 {
    (curve.affine_curvature_integral(x) - x * curve.mean_affine_curvature()) / 30.0
}

/// `β(x) = (k(x) − ∫k)/15 + ((2π)² − k(x))/3`.
pub fn beta_fn(curve: &AffineCurve, x: f64) -> f64 {
    let k = curve.affine_curvature(x);
    (k - curve.mean_affine_curvature()) / 15.0 + (TAU * TAU - k) / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBeta {
    /// `x_i = i/n`.
    pub grid: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// `α` and `β` sampled on `n` equispaced points of `[0, 1)`.
pub fn alpha_beta_functions(curve: &AffineCurve, n: usize) -> AlphaBeta {
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    AlphaBeta {
        alpha: grid.iter().map(|&x| alpha_fn(curve, x)).collect(),
        beta: grid.iter().map(|&x| beta_fn(curve, x)).collect(),
        grid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Lambda,
    S,
    Chord,
}

impl std::str::FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Self::Lambda),
            "s" => Ok(Self::S),
            "chord" => Ok(Self::Chord),
            other => Err(Error::InvalidArgument(format!("unknown quantity `{other}`"))),
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lambda => "lambda",
            Self::S => "s",
            Self::Chord => "chord",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub quantity: Quantity,
    pub qs: Vec<usize>,
    /// `max_j |measured − predicted|` per `q`.
    pub residuals: Vec<f64>,
    /// Whether each `q` entered the slope fit.
    pub included: Vec<bool>,
    /// Least-squares slope of `log residual` against `log q`.
    pub slope: f64,
    /// 95% confidence half-width of the slope; infinite with fewer than three points.
    pub half_width: f64,
    /// False when fewer than three residuals are above [`NOISE_FLOOR`].
    pub slope_reliable: bool,
    pub circle_distance: f64,
    /// `circle_distance ≤ DELTA_SMALL`.
    pub delta_small: bool,
}

fn max_residual(curve: &AffineCurve, q: usize, quantity: Quantity, opts: &SolverOptions) -> Result<f64> {
    let orbit = maximize_axial_with(curve, q, opts)?;
    if orbit.max_residual > MEASUREMENT_TOL {
        return Err(Error::Stagnation {
            q,
            iterations: orbit.iterations,
            residual: orbit.max_residual,
            params: orbit.params,
        });
    }
    let p = &orbit.params;
    let at = |j: usize| if j == q { p[0] + 1.0 } else { p[j] };
    let worst = match quantity {
        Quantity::Lambda => (1..=q)
            .map(|j| (at(j) - at(j - 1) - predict_lambda(curve, q, j)).abs())
            .fold(0.0, f64::max),
        Quantity::S => (0..=q)
            .map(|j| (at(j) - predict_s(curve, q, j, p[0])).abs())
            .fold(0.0, f64::max),
        Quantity::Chord => (0..q)
            .map(|j| {
                let prev = if j == 0 { p[q - 1] - 1.0 } else { p[j - 1] };
                let chord = (curve.point(at(j + 1)) - curve.point(prev)).norm();
                (chord - predict_chord(curve, q, j)).abs()
            })
            .fold(0.0, f64::max),
    };
    Ok(worst)
}

/// Two-sided 97.5% Student quantile.
fn student_t(dof: usize) -> f64 {
    const TABLE: [f64; 10] = [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];
    if dof == 0 {
        f64::INFINITY
    } else if dof <= TABLE.len() {
        TABLE[dof - 1]
    } else {
        1.96
    }
}

/// Least-squares slope of `y` on `x` and its 95% half-width.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n < 2 {
        return (f64::NAN, f64::INFINITY);
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if n < 3 {
        return (slope, f64::INFINITY);
    }
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    (slope, student_t(n - 2) * se)
}

/// Measures `max_j |measured − predicted|` on axial maximizers for each `q`
/// and fits the decay order.
pub fn residual_order(
    curve: &AffineCurve,
    quantity: Quantity,
    qs: &[usize],
    opts: &SolverOptions,
) -> Result<ExpansionReport> {
    if qs.is_empty() {
        return Err(Error::InvalidArgument("empty period set".into()));
    }
    let circle_distance = curve.circle_distance();
    let delta_small = circle_distance <= DELTA_SMALL;
    if !delta_small {
        log::warn!("circle distance {circle_distance:e} exceeds {DELTA_SMALL}; expansion constants may be large");
    }
    let residuals = qs
        .par_iter()
        .map(|&q| max_residual(curve, q, quantity, opts))
        .collect::<Result<Vec<_>>>()?;
    let included: Vec<bool> = residuals.iter().map(|&r| r >= NOISE_FLOOR).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = qs
        .iter()
        .zip(&residuals)
        .zip(&included)
        .filter(|(_, &inc)| inc)
        .map(|((&q, &r), _)| ((q as f64).ln(), r.ln()))
        .unzip();
    let (slope, half_width) = loglog_slope(&lx, &ly);
    Ok(ExpansionReport {
        quantity,
        qs: qs.to_vec(),
        residuals,
        included,
        slope,
        half_width,
        slope_reliable: lx.len() >= 3,
        circle_distance,
        delta_small,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{unit_circle_radius, CurveSpec};
    use approx::assert_relative_eq;

    fn unit(spec: CurveSpec, n: usize) -> AffineCurve {
        AffineCurve::build(&spec.normalize_unit_perimeter().unwrap(), n).unwrap()
    }

    #[test]
    fn constant_curvature_predictions_are_equispaced() {
        for c in [unit(CurveSpec::unit_circle(), 256), unit(CurveSpec::ellipse(1.7, 1.0), 1024)] {
            for q in [5, 12] {
                for j in 0..q {
                    assert_relative_eq!(predict_lambda(&c, q, j), 1.0 / q as f64, epsilon = 1e-12);
                    assert_relative_eq!(predict_s(&c, q, j, 0.1), 0.1 + j as f64 / q as f64, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_turn_and_spacing_sum() {
        let c = unit(CurveSpec::radial(1.0, vec![0.0, 0.0, 0.0, 0.003], vec![]), 1024);
        for q in [7, 20] {
            assert_relative_eq!(predict_s(&c, q, q, 0.0), 1.0, epsilon = 1e-14);
            let total: f64 = (1..=q).map(|j| predict_lambda(&c, q, j)).sum();
            assert!((total - 1.0).abs() <= 1e3 / (q as f64).powi(4), "{total}");
        }
    }

    #[test]
    fn circle_chord_matches_sine_series() {
        let c = unit(CurveSpec::unit_circle(), 256);
        let r = unit_circle_radius();
        assert_relative_eq!(predict_chord(&c, 8, 0), 0.0897937, epsilon = 1e-3);
        let mut prev = f64::INFINITY;
        for q in [8, 16, 32, 64] {
            let exact = 2.0 * r * (TAU / q as f64).sin();
            let err = (predict_chord(&c, q, 0) - exact).abs();
            assert!(err < prev / 25.0);
            prev = err;
        }
    }

    #[test]
    fn alpha_beta_symmetries() {
        let circle = unit(CurveSpec::unit_circle(), 256);
        let ab = alpha_beta_functions(&circle, 32);
        assert!(ab.alpha.iter().chain(&ab.beta).all(|v| v.abs() < 1e-10));

        let axial = unit(CurveSpec::radial(1.0, vec![0.0, 0.0, 0.0, 0.004, 0.0, 0.001], vec![]), 1024);
        let central = unit(CurveSpec::radial(1.0, vec![0.0, 0.0, 0.0, 0.004], vec![0.0, 0.002]), 1024);
        for x in [0.05, 0.21, 0.37] {
            assert_relative_eq!(alpha_fn(&axial, -x), -alpha_fn(&axial, x), epsilon = 1e-9);
            assert_relative_eq!(beta_fn(&axial, -x), beta_fn(&axial, x), epsilon = 1e-9);
            assert_relative_eq!(alpha_fn(&central, x + 0.5), alpha_fn(&central, x), epsilon = 1e-9);
            assert_relative_eq!(beta_fn(&central, x + 0.5), beta_fn(&central, x), epsilon = 1e-9);
        }
        assert_relative_eq!(alpha_fn(&axial, 1.0), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn beta_mean() {
        let c = unit(CurveSpec::radial(1.0, vec![0.0, 0.0, 0.004], vec![0.0, 0.0, 0.0, 0.002]), 1024);
        let ab = alpha_beta_functions(&c, 256);
        let mean = ab.beta.iter().sum::<f64>() / 256.0;
        assert_relative_eq!(mean, (TAU * TAU - c.mean_affine_curvature()) / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn circle_residuals_hit_the_noise_floor() {
        let c = unit(CurveSpec::unit_circle(), 256);
        let rep = residual_order(&c, Quantity::Lambda, &[8, 16, 32], &SolverOptions::default()).unwrap();
        assert!(rep.residuals.iter().all(|&r| r <= 1e-12));
        assert!(!rep.slope_reliable);
        assert!(rep.delta_small);
    }

    #[test]
    fn perturbed_orders() {
        let c = unit(CurveSpec::radial(1.0, vec![0.0, 0.0, 5e-3], vec![]), 2048);
        let o = SolverOptions::default();
        let qs = [8, 16, 32, 64];
        let l = residual_order(&c, Quantity::Lambda, &qs, &o).unwrap();
        assert!((-5.5..=-4.5).contains(&l.slope), "{l:?}");
        let s = residual_order(&c, Quantity::S, &qs, &o).unwrap();
        assert!((-4.5..=-3.5).contains(&s.slope), "{s:?}");
    }

    #[test]
    fn slope_of_exact_power_law() {
        let x: Vec<f64> = [1.0f64, 2.0, 4.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| -5.0 * v + 1.0).collect();
        let (m, hw) = loglog_slope(&x, &y);
        assert_relative_eq!(m, -5.0, epsilon = 1e-12);
        assert!(hw < 1e-10);
    }
}
