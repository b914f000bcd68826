//! Discrete Fourier coefficients of sampled period-1 functions.

use super::FamilySymmetry;
use crate::error::{Error, Result};
use crate::trig::{dft, TrigSeries};
use num_complex::Complex64;
use serde::Serialize;

/// Coefficients above this at the truncation order signal aliasing.
pub const ALIASING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSeries {
    /// `û_k` for `0 ≤ k ≤ K`; negative indices are conjugates.
    #[serde(serialize_with = "serialize_complex")]
    pub coeffs: Vec<Complex64>,
    pub k_max: usize,
    pub samples: usize,
    /// Symmetry class the samples are claimed to have, if any.
    pub declared: Option<FamilySymmetry>,
    /// `max_k |Im û_k|`; zero for axial classes.
    pub max_imag: f64,
    /// `max_{k odd} |û_k|`; zero for central classes.
    pub max_odd: f64,
    /// `|û_K| > ALIASING_TOL`.
    pub aliasing: bool,
}

fn serialize_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

impl FourierSeries {
    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self.coeffs.get(k.unsigned_abs() as usize) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `Σ_{|k| ≤ K} |û_k|`.
    pub fn l1(&self) -> f64 {
        self.coeffs[0].norm() + 2.0 * self.coeffs[1..].iter().map(|c| c.norm()).sum::<f64>()
    }

    /// Whether the coefficients meet the declared symmetry within `tol`.
    pub fn symmetric(&self, tol: f64) -> bool {
        match self.declared {
            Some(FamilySymmetry::Axial) => self.max_imag <= tol,
            Some(FamilySymmetry::Central) => self.max_odd <= tol,
            None => true,
        }
    }
}

/// `û_k = (1/N) Σ_j u(j/N) e^{−2πikj/N}` for `|k| ≤ K`; requires `N ≥ 4K`.
pub fn fourier_coeffs(samples: &[f64], k_max: usize, declared: Option<FamilySymmetry>) -> Result<FourierSeries> {
    let n = samples.len();
    if k_max == 0 || n < 4 * k_max {
        return Err(Error::InvalidArgument(format!(
            "{n} samples cannot resolve {k_max} modes (need at least 4K)"
        )));
    }
    let full = dft(samples);
    let coeffs: Vec<Complex64> = full[..=k_max].to_vec();
    let max_imag = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let max_odd = coeffs.iter().skip(1).step_by(2).map(|c| c.norm()).fold(0.0, f64::max);
    let aliasing = coeffs[k_max].norm() > ALIASING_TOL;
    if aliasing {
        log::warn!("|u_K| = {:e} at K = {k_max}: the truncation may alias", coeffs[k_max].norm());
    }
    Ok(FourierSeries {
        coeffs,
        k_max,
        samples: n,
        declared,
        max_imag,
        max_odd,
        aliasing,
    })
}

/// `(Σ_{j<q} u(j/q), q û_0 + 2q Σ_{k≥1} Re û_{qk})` from uniform samples of a band-limited `u`.
///
/// The sample count must exceed four times the bandwidth.
pub fn circle_mode_identity(samples: &[f64], q: usize) -> Result<(f64, f64)> {
    let n = samples.len();
    if q == 0 || n < 8 {
        return Err(Error::InvalidArgument(format!("need q >= 1 and at least 8 samples, got q = {q}, N = {n}")));
    }
    let full = dft(samples);
    let half = n / 2;
    let upper = full[n / 4..half].iter().map(|c| c.norm()).fold(0.0, f64::max);
    if upper > ALIASING_TOL {
        return Err(Error::InvalidArgument(format!(
            "samples are not band-limited below N/4 (|u_k| up to {upper:e})"
        )));
    }
    let series = TrigSeries::from_coeffs(full[..half].to_vec());
    let left: f64 = (0..q).map(|j| series.eval(j as f64 / q as f64)).sum();
    let qf = q as f64;
    let right = qf * full[0].re + 2.0 * qf * (1..).map(|m| m * q).take_while(|&k| k < half).map(|k| full[k].re).sum::<f64>();
    Ok((left, right))
}
