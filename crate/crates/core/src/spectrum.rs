//! Area spectrum samples, `Δ_q`, Mather β values and the fit of the odd-power
//! expansion of β at zero.
//!
//! `Δ_q` is the action of the maximizing `q`-periodic orbit, i.e. twice the
//! largest area of an inscribed `q`-gon that is a billiard trajectory.

use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::orbits::{maximize, OrbitClass, PeriodicOrbit, SolverOptions, Symmetry};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

/// Largest accepted condition number of the weighted design matrix.
pub const MAX_FIT_CONDITION: f64 = 1e12;

/// Statement attached to every spectrum sample.
pub const SAMPLE_SCOPE: &str =
    "maximizing orbits only: integer multiples of the maximal actions for 3 <= q <= q_max and of the enclosed area";

/// Central orbits only exist for even periods; odd periods fall back to the free search.
pub(crate) fn class_for(class: OrbitClass, q: usize) -> OrbitClass {
    if class == OrbitClass::Central && q % 2 == 1 {
        OrbitClass::Free
    } else {
        class
    }
}

fn maximizer(curve: &AffineCurve, q: usize, class: OrbitClass, opts: &SolverOptions) -> Result<PeriodicOrbit> {
    maximize(curve, q, class_for(class, q), opts)
}

/// `Δ_q`: action of the maximizer in the given class.
pub fn delta_q(curve: &AffineCurve, q: usize, class: OrbitClass, opts: &SolverOptions) -> Result<f64> {
    Ok(maximizer(curve, q, class, opts)?.action)
}

/// `β(1/q) = −Δ_q / q`.
pub fn mather_beta(curve: &AffineCurve, q: usize, class: OrbitClass, opts: &SolverOptions) -> Result<f64> {
    Ok(-delta_q(curve, q, class, opts)? / q as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub q: usize,
    pub delta: f64,
    pub beta: f64,
    /// Largest reflection residual of the maximizer.
    pub residual: f64,
    pub symmetry: Symmetry,
}

/// One row per `q ∈ [q_min, q_max]`, computed in parallel.
pub fn spectrum_table(
    curve: &AffineCurve,
    q_min: usize,
    q_max: usize,
    class: OrbitClass,
    opts: &SolverOptions,
) -> Result<Vec<SpectrumRow>> {
    if q_min < 3 || q_max < q_min {
        return Err(Error::InvalidArgument(format!("bad period range {q_min}:{q_max}")));
    }
    (q_min..=q_max)
        .into_par_iter()
        .map(|q| {
            let o = maximizer(curve, q, class, opts)?;
            Ok(SpectrumRow {
                q,
                delta: o.action,
                beta: -o.action / q as f64,
                residual: o.max_residual,
                symmetry: o.symmetry,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaFit {
    pub q_min: usize,
    pub q_max: usize,
    pub beta1: f64,
    pub beta3: f64,
    pub beta5: f64,
    pub beta7: f64,
    /// Weighted residual norm.
    pub residual: f64,
    /// Ratio of extreme singular values of the weighted design matrix.
    pub condition: f64,
}

/// Least-squares fit of `q·β(1/q) = β₁ + β₃/q² + β₅/q⁴ + β₇/q⁶` to the rows.
///
/// Squared residuals carry weight `q⁶`.
pub fn fit_beta(rows: &[SpectrumRow]) -> Result<BetaFit> {
    if rows.len() < 9 {
        return Err(Error::InvalidArgument(format!(
            "a four-term fit needs at least 9 periods, got {}",
            rows.len()
        )));
    }
    let n = rows.len();
    let mut a = DMatrix::zeros(n, 4);
    let mut b = DVector::zeros(n);
    for (i, r) in rows.iter().enumerate() {
        let q = r.q as f64;
        let w = q.powi(3);
        let x = 1.0 / (q * q);
        for c in 0..4 {
            a[(i, c)] = w * x.powi(c as i32);
        }
        b[i] = w * r.beta * q;
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_FIT_CONDITION {
        return Err(Error::IllConditionedFit { condition });
    }
    let coef = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;
    let residual = (&a * &coef - &b).norm();
    Ok(BetaFit {
        q_min: rows.iter().map(|r| r.q).min().unwrap_or(0),
        q_max: rows.iter().map(|r| r.q).max().unwrap_or(0),
        beta1: coef[0],
        beta3: coef[1],
        beta5: coef[2],
        beta7: coef[3],
        residual,
        condition,
    })
}

/// Computes `Δ_q` for `q ∈ [q_min, q_max]` and fits the expansion.
pub fn fit_beta_coeffs(
    curve: &AffineCurve,
    q_min: usize,
    q_max: usize,
    class: OrbitClass,
    opts: &SolverOptions,
) -> Result<BetaFit> {
    if q_max < q_min + 8 {
        return Err(Error::InvalidArgument(format!(
            "fit range {q_min}:{q_max} is too short, need q_max >= q_min + 8"
        )));
    }
    fit_beta(&spectrum_table(curve, q_min, q_max, class, opts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum SpectrumSource {
    Orbit { q: usize, multiple: usize },
    Area { multiple: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: f64,
    #[serde(flatten)]
    pub source: SpectrumSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub scope: &'static str,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumSample {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

/// Multiples `m·Δ_q` (`3 ≤ q ≤ q_max`) and `m·A` for `1 ≤ m ≤ m_max`, ascending.
pub fn area_spectrum_sample(
    curve: &AffineCurve,
    q_max: usize,
    m_max: usize,
    class: OrbitClass,
    opts: &SolverOptions,
) -> Result<SpectrumSample> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be positive".into()));
    }
    let rows = spectrum_table(curve, 3, q_max, class, opts)?;
    let area = curve.area();
    let mut entries = Vec::with_capacity((rows.len() + 1) * m_max);
    for m in 1..=m_max {
        let mf = m as f64;
        entries.push(SpectrumEntry {
            value: mf * area,
            source: SpectrumSource::Area { multiple: m },
        });
        for r in &rows {
            entries.push(SpectrumEntry {
                value: mf * r.delta,
                source: SpectrumSource::Orbit { q: r.q, multiple: m },
            });
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(SpectrumSample {
        scope: SAMPLE_SCOPE,
        entries,
    })
}
