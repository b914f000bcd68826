//! Truncated trigonometric series for real 1-periodic functions.
//!
//! Values are reconstructed from uniform samples with an FFT. Coefficients
//! below the measured noise floor are dropped so that high derivatives stay
//! clean; evaluation at an arbitrary point is then `O(K)` in the retained
//! bandwidth `K`, not in the sample count.

use nalgebra::Vector2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Relative magnitude below which coefficients are treated as zero.
const REL_FLOOR: f64 = 1e-18;

/// Normalized forward DFT, `c_k = (1/N) Σ f_j e^{-2πi jk/N}`, all N bins.
pub fn dft(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    if n == 0 {
        return buf;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Index of the last coefficient worth keeping out of the `0..n/2` half spectrum.
fn retained_bandwidth(mags: &[f64], n: usize, scale: f64) -> usize {
    let half = mags.len();
    if half == 0 {
        return 0;
    }
    // The mean is excluded: an offset says nothing about the oscillatory scale.
    let peak = mags[1..].iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0;
    }
    let band = if n >= 16 { &mags[3 * n / 8..] } else { &mags[half..] };
    if band.is_empty() {
        return half - 1;
    }
    // Rounding noise is roughly white, so the band median measures its level.
    let mut sorted = band.to_vec();
    sorted.sort_by(f64::total_cmp);
    let noise = sorted[sorted.len() / 2];
    // Rounding in the samples is not white (root finding correlates it), so
    // do not count on averaging over bins.
    let rounding = 4.0 * f64::EPSILON * scale;
    let thresh = (4.0 * noise).max(rounding).max(REL_FLOOR * peak);
    mags.iter().rposition(|&m| m > thresh).unwrap_or(0)
}

/// Multiplies `e^{2πiks}` by `(2πik)^order`.
#[inline]
fn ik_pow(k: usize, order: usize) -> Complex64 {
    let w = TAU * k as f64;
    let mag = w.powi(order as i32);
    match order % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// A real 1-periodic function `f(s) = c_0 + 2 Re Σ_{k≥1} c_k e^{2πiks}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    coeffs: Vec<Complex64>,
}

impl TrigSeries {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the mean coefficient");
        Self { coeffs }
    }

    /// Interpolates uniform samples `f(j/N)` and drops the noise tail.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let c = dft(samples);
        // Nyquist bin is ambiguous for real data; discard it.
        let half = n.div_ceil(2).max(1);
        let mags: Vec<f64> = c[..half].iter().map(|z| z.norm()).collect();
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let k = retained_bandwidth(&mags, n, scale);
        Self::from_coeffs(c[..=k].to_vec())
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = (0..n).map(|j| f(j as f64 / n as f64)).collect();
        Self::from_samples(&samples)
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `e^{2πiks}` for any integer k.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.derivative(s, 0)
    }

    pub fn derivative(&self, s: f64, order: usize) -> f64 {
        let mut out = [0.0; 1];
        self.jet_from(s, order, &mut out);
        out[0]
    }

    /// Fills `out[d] = f^{(d)}(s)` for `d < out.len()`.
    pub fn jet(&self, s: f64, out: &mut [f64]) {
        self.jet_from(s, 0, out);
    }

    fn jet_from(&self, s: f64, first: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if first == 0 && !out.is_empty() {
            out[0] = self.coeffs[0].re;
        }
        let (sn, cs) = (TAU * s.rem_euclid(1.0)).sin_cos();
        let w = Complex64::new(cs, sn);
        let mut z = Complex64::new(1.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            z *= w;
            let step = Complex64::new(0.0, TAU * k as f64);
            let mut term = c * z * ik_pow(k, first);
            for v in out.iter_mut() {
                *v += 2.0 * term.re;
                term *= step;
            }
        }
    }

    /// `∫_0^x f(s) ds`, valid for any real x.
    pub fn integral(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0].re * x;
        let (sn, cs) = (TAU * x.rem_euclid(1.0)).sin_cos();
        let w = Complex64::new(cs, sn);
        let mut z = Complex64::new(1.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            z *= w;
            let denom = Complex64::new(0.0, TAU * k as f64);
            acc += 2.0 * (c * (z - 1.0) / denom).re;
        }
        acc
    }

    /// The series of `s ↦ f(s + phase)`.
    pub fn shifted(&self, phase: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, TAU * k as f64 * phase))
            .collect();
        Self { coeffs }
    }

    /// The series of `f'`.
    pub fn differentiated(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * ik_pow(k, 1))
            .collect();
        Self { coeffs }
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(j as f64 / n as f64)).collect()
    }
}

/// A closed plane curve as a pair of trigonometric series sharing one bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSeries {
    cx: Vec<Complex64>,
    cy: Vec<Complex64>,
}

impl PlaneSeries {
    pub fn from_samples(points: &[Vector2<f64>]) -> Self {
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        let x = TrigSeries::from_samples(&xs);
        let y = TrigSeries::from_samples(&ys);
        let k = x.bandwidth().max(y.bandwidth());
        let pad = |mut v: Vec<Complex64>| {
            v.resize(k + 1, Complex64::new(0.0, 0.0));
            v
        };
        Self {
            cx: pad(x.coeffs),
            cy: pad(y.coeffs),
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.cx.len() - 1
    }

    pub fn shifted(&self, phase: f64) -> Self {
        let rot = |v: &[Complex64]| -> Vec<Complex64> {
            v.iter()
                .enumerate()
                .map(|(k, c)| c * Complex64::from_polar(1.0, TAU * k as f64 * phase))
                .collect()
        };
        Self {
            cx: rot(&self.cx),
            cy: rot(&self.cy),
        }
    }

    /// Fills `out[d] = γ^{(d)}(s)` for `d < out.len()`.
    pub fn jet(&self, s: f64, out: &mut [Vector2<f64>]) {
        out.iter_mut().for_each(|v| *v = Vector2::zeros());
        if out.is_empty() {
            return;
        }
        out[0] = Vector2::new(self.cx[0].re, self.cy[0].re);
        let (sn, cs) = (TAU * s.rem_euclid(1.0)).sin_cos();
        let w = Complex64::new(cs, sn);
        let mut z = Complex64::new(1.0, 0.0);
        for k in 1..self.cx.len() {
            z *= w;
            let step = Complex64::new(0.0, TAU * k as f64);
            let mut tx = self.cx[k] * z;
            let mut ty = self.cy[k] * z;
            for v in out.iter_mut() {
                v.x += 2.0 * tx.re;
                v.y += 2.0 * ty.re;
                tx *= step;
                ty *= step;
            }
        }
    }

    pub fn derivative(&self, s: f64, order: usize) -> Vector2<f64> {
        let (sn, cs) = (TAU * s.rem_euclid(1.0)).sin_cos();
        let w = Complex64::new(cs, sn);
        let mut z = Complex64::new(1.0, 0.0);
        let mut v = if order == 0 {
            Vector2::new(self.cx[0].re, self.cy[0].re)
        } else {
            Vector2::zeros()
        };
        for k in 1..self.cx.len() {
            z *= w;
            let f = z * ik_pow(k, order);
            v.x += 2.0 * (self.cx[k] * f).re;
            v.y += 2.0 * (self.cy[k] * f).re;
        }
        v
    }
}
