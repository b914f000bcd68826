//! Affine-arc-length parametrizations of strictly convex boundaries.

mod spec;

pub use spec::{unit_circle_radius, AffineTransform, CurveSpec, Shape};

use crate::error::{Error, Result};
use crate::geometry::{det, Vec2};
use crate::trig::{PlaneSeries, TrigSeries};
use std::f64::consts::{PI, TAU};

pub const MIN_SAMPLES: usize = 64;
pub const DEFAULT_SAMPLES: usize = 4096;

/// Tolerance on the frame identities for a build with `n` samples.
pub fn frame_tolerance(n: usize) -> f64 {
    100.0 * (n as f64).powi(-3)
}

/// Largest deviations from the affine frame identities over the sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameResiduals {
    /// `|det(γ', γ'') − 1|`
    pub unimodular: f64,
    /// `|det(γ', γ''')|`
    pub orthogonal: f64,
    /// `‖γ''' + k γ'‖`
    pub structure: f64,
    /// `|‖γ'‖ − ρ^{1/3}|`
    pub speed: f64,
}

impl FrameResiduals {
    pub fn max(&self) -> f64 {
        self.unimodular
            .max(self.orthogonal)
            .max(self.structure)
            .max(self.speed)
    }
}

/// A boundary parametrized by affine arc length on `[0, 1)`.
///
/// Immutable once built; every query is a pure function of the stored series.
#[derive(Debug, Clone)]
pub struct AffineCurve {
    spec: CurveSpec,
    n: usize,
    perimeter: f64,
    gamma: PlaneSeries,
    k: TrigSeries,
    rho: TrigSeries,
}

/// Solves `S(θ) = target` for the increasing map `S` with `S(0) = 0`, `S(2π) = 1`.
fn invert_monotone(target: f64, density: &TrigSeries, lambda: f64) -> Result<f64> {
    let s_of = |th: f64| TAU * density.integral(th / TAU) / lambda;
    let ds = |th: f64| density.eval(th / TAU) / lambda;
    let (mut lo, mut hi) = (0.0, TAU);
    let mut th = TAU * target;
    for _ in 0..100 {
        let g = s_of(th) - target;
        if g.abs() <= 4.0 * f64::EPSILON {
            return Ok(th);
        }
        if g > 0.0 {
            hi = th;
        } else {
            lo = th;
        }
        let mut next = th - g / ds(th);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - th).abs() <= 1e-15 * TAU {
            return Ok(next);
        }
        th = next;
    }
    Err(Error::RootNotFound {
        what: "affine parameter inversion",
        near: target,
    })
}

impl AffineCurve {
    /// Samples the spec at `n` uniform affine parameters and builds spectral interpolants.
    pub fn build(spec: &CurveSpec, n: usize) -> Result<Self> {
        if n < MIN_SAMPLES {
            return Err(Error::TooFewSamples { n, min: MIN_SAMPLES });
        }
        spec.validate()?;
        let density = spec.density_series((2 * n).max(256));
        let lambda = TAU * density.mean();
        if (lambda - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { perimeter: lambda });
        }

        let mut points = Vec::with_capacity(n);
        let mut rho = Vec::with_capacity(n);
        let mut k = Vec::with_capacity(n);
        for i in 0..n {
            let target = (i as f64 / n as f64 + spec.phase).rem_euclid(1.0);
            let th = invert_monotone(target, &density, lambda)?;
            points.push(spec.point(th));
            rho.push(spec.curvature_radius(th));
            k.push(spec.affine_curvature(th, lambda));
        }
        let gamma = PlaneSeries::from_samples(&points);

        Ok(Self {
            spec: spec.clone(),
            n,
            perimeter: lambda,
            gamma,
            k: TrigSeries::from_samples(&k),
            rho: TrigSeries::from_samples(&rho),
        })
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn samples(&self) -> usize {
        self.n
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Retained bandwidth of the position interpolant.
    pub fn bandwidth(&self) -> usize {
        self.gamma.bandwidth()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| i as f64 / self.n as f64)
    }

    /// `γ^{(order)}(s)` for `order ≤ 3`.
    pub fn eval(&self, s: f64, order: usize) -> Result<Vec2> {
        if order > 3 {
            return Err(Error::DerivativeOrder(order));
        }
        Ok(self.gamma.derivative(s, order))
    }

    /// Any derivative of the interpolant; higher orders lose accuracy.
    pub fn derivative(&self, s: f64, order: usize) -> Vec2 {
        self.gamma.derivative(s, order)
    }

    pub fn point(&self, s: f64) -> Vec2 {
        self.gamma.derivative(s, 0)
    }

    pub fn tangent(&self, s: f64) -> Vec2 {
        self.gamma.derivative(s, 1)
    }

    /// `[γ, γ', …, γ^{(M−1)}]` at `s`.
    pub fn jet<const M: usize>(&self, s: f64) -> [Vec2; M] {
        let mut out = [Vec2::zeros(); M];
        self.gamma.jet(s, &mut out);
        out
    }

    pub fn affine_curvature(&self, s: f64) -> f64 {
        self.k.eval(s)
    }

    pub fn affine_curvature_derivative(&self, s: f64) -> f64 {
        self.k.derivative(s, 1)
    }

    /// `∫_0^1 k`.
    pub fn mean_affine_curvature(&self) -> f64 {
        self.k.mean()
    }

    /// `∫_0^x k`.
    pub fn affine_curvature_integral(&self, x: f64) -> f64 {
        self.k.integral(x)
    }

    pub fn affine_curvature_series(&self) -> &TrigSeries {
        &self.k
    }

    /// Euclidean radius of curvature at the point with affine parameter `s`.
    pub fn curvature_radius(&self, s: f64) -> f64 {
        self.rho.eval(s)
    }

    /// Enclosed area `½∮ det(γ, γ') ds`, by the trapezoid rule on the grid.
    pub fn area(&self) -> f64 {
        let sum: f64 = self
            .grid()
            .map(|s| {
                let [p, dp] = self.jet::<2>(s);
                det(p, dp)
            })
            .sum();
        0.5 * sum / self.n as f64
    }

    pub fn frame_residuals(&self) -> FrameResiduals {
        let mut r = FrameResiduals {
            unimodular: 0.0,
            orthogonal: 0.0,
            structure: 0.0,
            speed: 0.0,
        };
        for (i, s) in self.grid().enumerate() {
            let [_, d1, d2, d3] = self.jet::<4>(s);
            let k = self.k.eval(s);
            let rho = self.rho.eval(s);
            r.unimodular = r.unimodular.max((det(d1, d2) - 1.0).abs());
            r.orthogonal = r.orthogonal.max(det(d1, d3).abs());
            r.structure = r.structure.max((d3 + k * d1).norm());
            r.speed = r.speed.max((d1.norm() - rho.cbrt()).abs());
            debug_assert!(i < self.n);
        }
        r
    }

    /// The parameter `s* ∈ (s, s+1)` whose tangent is antiparallel to `γ'(s)`.
    pub fn opposite_point(&self, s: f64) -> Result<f64> {
        let t0 = self.tangent(s);
        let g = |x: f64| det(t0, self.tangent(x));
        let dg = |x: f64| det(t0, self.derivative(x, 2));
        // g > 0 on (s, s*) and g < 0 on (s*, s+1).
        const SCAN: usize = 64;
        let mut lo = s;
        let mut hi = s + 1.0;
        let mut prev = s;
        for i in 1..SCAN {
            let x = s + i as f64 / SCAN as f64;
            if g(x) <= 0.0 {
                lo = prev;
                hi = x;
                break;
            }
            prev = x;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let v = g(x);
            if v > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let mut next = x - v / dg(x);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 || hi - lo <= 1e-15 {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::RootNotFound {
            what: "opposite point",
            near: s,
        })
    }

    /// `Σ_{d=0}^{6} sup_s ‖γ^{(d)} − γ_D^{(d)}‖` against the unit-perimeter
    /// circle `D` tangent to the curve at `γ(0)` with matching orientation.
    pub fn circle_distance(&self) -> f64 {
        const ORDERS: usize = 7;
        let r = unit_circle_radius();
        let [p0, t0] = self.jet::<2>(0.0);
        let phi0 = t0.y.atan2(t0.x) - 0.5 * PI;
        let center = p0 - r * Vec2::new(phi0.cos(), phi0.sin());
        let mut sup = [0.0f64; ORDERS];
        for s in self.grid() {
            let jet = self.jet::<ORDERS>(s);
            let ang = TAU * s + phi0;
            for (d, v) in jet.iter().enumerate() {
                let a = ang + d as f64 * 0.5 * PI;
                let mut disk = r * TAU.powi(d as i32) * Vec2::new(a.cos(), a.sin());
                if d == 0 {
                    disk += center;
                }
                sup[d] = sup[d].max((v - disk).norm());
            }
        }
        sup.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ellipse_unit(a_over_b: f64) -> CurveSpec {
        CurveSpec::ellipse(a_over_b, 1.0).normalize_unit_perimeter().unwrap()
    }

    #[test]
    fn rejects_small_and_unnormalized() {
        assert!(matches!(
            AffineCurve::build(&CurveSpec::unit_circle(), 32),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            AffineCurve::build(&CurveSpec::circle(1.0), 256),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn circle_closed_form() {
        let c = AffineCurve::build(&CurveSpec::unit_circle(), 1024).unwrap();
        let r = unit_circle_radius();
        for s in [0.0, 0.1, 0.37, 0.5, 0.9] {
            let p = c.point(s);
            assert_relative_eq!(p, r * Vec2::new((TAU * s).cos(), (TAU * s).sin()), epsilon = 1e-15);
            assert_relative_eq!(c.affine_curvature(s), TAU * TAU, max_relative = 1e-10);
        }
        let t = c.eval(0.0, 1).unwrap();
        assert_relative_eq!(t.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(t.norm(), TAU.powf(-0.5), max_relative = 1e-13);
        assert_relative_eq!(c.eval(0.5, 0).unwrap(), Vec2::new(-r, 0.0), epsilon = 1e-15);
        assert_relative_eq!(c.area(), 1.0 / (8.0 * PI * PI), max_relative = 1e-13);
        assert!(c.circle_distance() < 1e-10);
        assert!(matches!(c.eval(0.1, 4), Err(Error::DerivativeOrder(4))));
    }

    #[test]
    fn periodic_evaluation() {
        let spec = CurveSpec::radial(1.0, vec![0.0, 0.01, 0.02], vec![0.01])
            .normalize_unit_perimeter()
            .unwrap();
        let c = AffineCurve::build(&spec, 512).unwrap();
        assert_relative_eq!(c.point(0.0), c.point(1.0), epsilon = 1e-15);
        assert_relative_eq!(c.point(-0.25), c.point(0.75), epsilon = 1e-15);
    }

    #[test]
    fn ellipse_has_constant_affine_curvature() {
        let c = AffineCurve::build(&ellipse_unit(2.5), 1024).unwrap();
        for s in [0.0, 0.13, 0.5, 0.77] {
            assert_relative_eq!(c.affine_curvature(s), TAU * TAU, max_relative = 1e-9);
        }
        assert!(c.frame_residuals().max() < 1e-9);
    }

    #[test]
    fn frame_identities_at_default_resolution() {
        let spec = CurveSpec::radial(1.0, vec![0.0, 0.03, 0.02, 0.01], vec![0.0, 0.02])
            .normalize_unit_perimeter()
            .unwrap();
        let c = AffineCurve::build(&spec, DEFAULT_SAMPLES).unwrap();
        let r = c.frame_residuals();
        assert!(r.unimodular <= 1e-8, "{r:?}");
        assert!(r.structure <= 1e-6, "{r:?}");
        assert!(r.speed <= 1e-8, "{r:?}");
    }

    #[test]
    fn frame_residuals_shrink_with_resolution() {
        let spec = CurveSpec::radial(1.0, vec![0.0, 0.0, 0.0, 0.0, 0.004], vec![])
            .normalize_unit_perimeter()
            .unwrap();
        let coarse = AffineCurve::build(&spec, 64).unwrap().frame_residuals().max();
        let fine = AffineCurve::build(&spec, 128).unwrap().frame_residuals().max();
        assert!(fine <= (coarse / 8.0).max(1e-12), "{coarse:e} -> {fine:e}");
        assert!(fine <= frame_tolerance(128), "{fine:e}");
    }

    #[test]
    fn opposite_points() {
        let c = AffineCurve::build(&CurveSpec::unit_circle(), 256).unwrap();
        assert_relative_eq!(c.opposite_point(0.2).unwrap(), 0.7, epsilon = 1e-13);

        let central = CurveSpec::radial(1.0, vec![0.0, 0.02, 0.0, 0.01], vec![0.0, 0.01])
            .normalize_unit_perimeter()
            .unwrap();
        let c = AffineCurve::build(&central, 512).unwrap();
        let s = 0.31;
        let o = c.opposite_point(s).unwrap();
        assert_relative_eq!(o, s + 0.5, epsilon = 1e-12);

        let axial = CurveSpec::radial(1.0, vec![0.02, 0.01, 0.015], vec![])
            .normalize_unit_perimeter()
            .unwrap();
        let c = AffineCurve::build(&axial, 512).unwrap();
        let o = c.opposite_point(0.1).unwrap();
        let back = c.opposite_point(o).unwrap();
        assert_relative_eq!(back - 1.0, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn circle_distance_grows_with_amplitude() {
        let d = |e: f64| {
            let spec = CurveSpec::radial(1.0, vec![0.0, e], vec![])
                .normalize_unit_perimeter()
                .unwrap();
            AffineCurve::build(&spec, 512).unwrap().circle_distance()
        };
        let zero = AffineCurve::build(
            &CurveSpec::radial(unit_circle_radius(), vec![0.0, 0.0], vec![0.0]),
            256,
        )
        .unwrap()
        .circle_distance();
        assert!(zero < 1e-10);
        let (a, b) = (d(1e-3), d(2e-3));
        assert!(a > 0.0 && b > a, "{a} {b}");
    }

    #[test]
    fn unimodular_image_has_same_affine_curvature() {
        let base = CurveSpec::radial(1.0, vec![0.0, 0.02, 0.01], vec![0.0, 0.0, 0.01])
            .normalize_unit_perimeter()
            .unwrap();
        let t = AffineTransform {
            matrix: [[1.2, 0.3], [-0.1, (1.0 - 0.3 * 0.1) / 1.2]],
            shift: [0.5, 0.25],
        };
        let a = AffineCurve::build(&base, DEFAULT_SAMPLES).unwrap();
        let b = AffineCurve::build(&base.clone().transformed(t), DEFAULT_SAMPLES).unwrap();
        for s in a.grid().step_by(37) {
            assert_relative_eq!(a.affine_curvature(s), b.affine_curvature(s), epsilon = 1e-8);
        }
    }

    #[test]
    fn phase_shifts_the_origin() {
        let spec = CurveSpec::radial(1.0, vec![0.02, 0.01], vec![0.0, 0.0, 0.01])
            .normalize_unit_perimeter()
            .unwrap();
        let a = AffineCurve::build(&spec, 512).unwrap();
        let b = AffineCurve::build(&spec.clone().with_phase(0.2), 512).unwrap();
        assert_relative_eq!(b.point(0.1), a.point(0.3), epsilon = 1e-14);
    }
}
