//! The envelope identity for `∂_τΔ_q` and the Fourier rows of the rigidity system.

use super::{fourier_coeffs, DeformationField, DomainFamily, DEFAULT_H_TAU};
use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::expansion::{beta_fn, chord_bracket};
use crate::orbits::{maximize, OrbitClass, SolverOptions};
use crate::spectrum::class_for;
use crate::trig::{dft, TrigSeries};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// `Σ_j ‖γ(s_{j+1}) − γ(s_{j−1})‖ n_j` over a closed orbit.
pub fn spectral_sum(curve: &AffineCurve, params: &[f64], n_values: &[f64]) -> f64 {
    let q = params.len();
    (0..q)
        .map(|j| {
            let prev = curve.point(params[(j + q - 1) % q]);
            let next = curve.point(params[(j + 1) % q]);
            (next - prev).norm() * n_values[j]
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub q: usize,
    pub tau: f64,
    pub h: f64,
    /// `(Δ_q(τ+h) − Δ_q(τ−h)) / 2h`.
    pub finite_difference: f64,
    pub spectral_sum: f64,
    pub residual: f64,
}

/// Compares the central difference of `Δ_q` with the chord-weighted sum of `n`
/// at the maximizer; the maximizer class follows the family symmetry.
pub fn isospectral_residual(
    family: &DomainFamily,
    q: usize,
    tau: f64,
    h: f64,
    n: usize,
    opts: &SolverOptions,
) -> Result<EnvelopeCheck> {
    if !(h > 0.0) || !family.contains(tau - h) || !family.contains(tau + h) {
        return Err(Error::InvalidArgument(format!("tau = {tau} with step {h} leaves the family range")));
    }
    let class = class_for(family.symmetry.orbit_class(), q);
    let delta = |t: f64| -> Result<f64> { Ok(maximize(&family.curve_at(t, n)?, q, class, opts)?.action) };
    let ((plus, minus), centre) = rayon::join(
        || rayon::join(|| delta(tau + h), || delta(tau - h)),
        || -> Result<(DeformationField, Vec<f64>)> {
            let field = DeformationField::new(family, tau, DEFAULT_H_TAU.min(h), n)?;
            let orbit = maximize(field.curve(), q, class, opts)?;
            Ok((field, orbit.params))
        },
    );
    let (field, params) = centre?;
    let finite_difference = (plus? - minus?) / (2.0 * h);
    let n_values: Vec<f64> = params.iter().map(|&s| field.n(s)).collect();
    let sum = spectral_sum(field.curve(), &params, &n_values);
    Ok(EnvelopeCheck {
        q,
        tau,
        h,
        finite_difference,
        spectral_sum: sum,
        residual: (finite_difference - sum).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityRow {
    pub q: usize,
    /// Starting vertex `s₀` of the maximizer used.
    pub s0: f64,
    pub fourier_side: f64,
    pub direct_side: f64,
    pub gap: f64,
}

/// Full-spectrum coefficient `c_p`, zero outside `|p| < N/2`.
fn bin(c: &[Complex64], p: i64) -> Complex64 {
    let n = c.len() as i64;
    if 2 * p.abs() >= n {
        Complex64::new(0.0, 0.0)
    } else {
        c[p.rem_euclid(n) as usize]
    }
}

/// One row of the rigidity system at period `q`.
///
/// `fourier_side` expands `(q/2) Σ_j u(s_j) C_j` through `û`, the coefficients
/// `β_p` of `β` and `α_p(s₀)` of `x ↦ (1/30)∫_{s₀}^{s₀+x}k − (x/30)∫k`;
/// `direct_side` evaluates it on the maximizer with `C_j` the chord bracket at
/// `s₀ + j/q`. They agree up to `O(1/q⁴)` remainders and truncation.
pub fn rigidity_row(
    curve: &AffineCurve,
    u_samples: &[f64],
    q: usize,
    k_max: usize,
    class: OrbitClass,
    opts: &SolverOptions,
) -> Result<RigidityRow> {
    if k_max < 4 * q {
        return Err(Error::InvalidArgument(format!(
            "truncation K = {k_max} is too small for q = {q} (need K >= 4q)"
        )));
    }
    let u_hat = fourier_coeffs(u_samples, k_max, None)?;
    let n = u_samples.len();
    let orbit = maximize(curve, q, class_for(class, q), opts)?;
    let s0 = orbit.params[0];

    let grid: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let base = curve.affine_curvature_integral(s0);
    let kbar = curve.mean_affine_curvature();
    let alpha: Vec<f64> = grid
        .iter()
        .map(|&x| (curve.affine_curvature_integral(s0 + x) - base - x * kbar) / 30.0)
        .collect();
    let beta: Vec<f64> = grid.iter().map(|&x| beta_fn(curve, x)).collect();
    let (a_hat, b_hat) = (dft(&alpha), dft(&beta));

    let qf = q as f64;
    let qi = q as i64;
    let half = (n / 2) as i64;
    let phase = |p: i64| Complex64::from_polar(1.0, TAU * p as f64 * s0);
    let mut total = Complex64::new(0.0, 0.0);
    for k in -(k_max as i64)..=(k_max as i64) {
        let uk = u_hat.coefficient(k);
        if uk == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        if k % qi == 0 {
            inner += 1.0 - 2.0 * PI * PI / (3.0 * qf * qf);
        }
        let ik = Complex64::new(0.0, TAU * k as f64);
        let s_lo = (k - half).div_euclid(qi);
        let s_hi = (k + half).div_euclid(qi) + 1;
        let mut corr = Complex64::new(0.0, 0.0);
        for s in s_lo..=s_hi {
            let p = s * qi - k;
            corr += 0.5 * bin(&b_hat, p) * phase(p) + ik * bin(&a_hat, p);
        }
        inner += corr / (qf * qf);
        total += uk * phase(k) * inner;
    }
    let fourier_side = qf * total.re;

    let u = TrigSeries::from_coeffs(dft(u_samples)[..n / 2].to_vec());
    let direct_side = 0.5
        * qf
        * orbit
            .params
            .iter()
            .enumerate()
            .map(|(j, &s)| u.eval(s) * chord_bracket(curve, q, s0 + j as f64 / qf))
            .sum::<f64>();
    Ok(RigidityRow {
        q,
        s0,
        fourier_side,
        direct_side,
        gap: (fourier_side - direct_side).abs(),
    })
}

/// Rows for every `q` at the base member of a normalized family.
pub fn rigidity_rows(
    family: &DomainFamily,
    qs: &[usize],
    k_max: usize,
    n: usize,
    opts: &SolverOptions,
) -> Result<Vec<RigidityRow>> {
    let field = DeformationField::new(family, family.base_tau(), DEFAULT_H_TAU, n)?;
    let samples = (4 * k_max).max(n).next_power_of_two();
    let u = field.u_samples(samples);
    let class = family.symmetry.orbit_class();
    qs.par_iter()
        .map(|&q| rigidity_row(field.curve(), &u, q, k_max, class, opts))
        .collect()
}
