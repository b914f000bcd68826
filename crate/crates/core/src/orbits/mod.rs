//! Maximizing periodic orbits of rotation number `1/q`.
//!
//! The action `Σ ω(γ(s_j), γ(s_{j+1}))` is maximized over ordered tuples,
//! optionally restricted to the axial or central symmetry class. Each search
//! starts equispaced and runs a saddle-free Newton ascent; see [`SolverOptions`].

mod radon;
mod solver;

pub use radon::{four_orbit_map, four_orbit_residual, integrability_probe, radon_anchor, radon_anchor_near, FourOrbit, ProbeReport};
pub use solver::SolverOptions;

use crate::billiard::reflection_residual;
use crate::curve::AffineCurve;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use solver::{ascend, Layout, Slot, Solution};

/// Symmetry class of a computed orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    AxialEven,
    AxialOdd,
    Central,
    Free,
}

/// Which maximizer to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    Axial,
    Central,
    Free,
}

impl std::str::FromStr for OrbitClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axial" => Ok(Self::Axial),
            "central" => Ok(Self::Central),
            "free" => Ok(Self::Free),
            other => Err(Error::InvalidArgument(format!("unknown orbit class `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub q: usize,
    /// Increasing parameters with `s_{q-1} < s_0 + 1`.
    pub params: Vec<f64>,
    pub action: f64,
    pub symmetry: Symmetry,
    /// Largest `|reflection residual|` over all vertices (a pinned vertex of a
    /// non-invariant start need not reflect).
    pub max_residual: f64,
    pub iterations: usize,
    /// Number of distinct local maxima met across restarts.
    pub local_maxima: usize,
}

impl PeriodicOrbit {
    fn from_solution(curve: &AffineCurve, sol: Solution, symmetry: Symmetry, local_maxima: usize) -> Self {
        let residuals = vertex_residuals(curve, &sol.params);
        Self {
            q: sol.params.len(),
            max_residual: residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
            params: sol.params,
            action: sol.action,
            symmetry,
            iterations: sol.iterations,
            local_maxima,
        }
    }

    pub fn residuals(&self, curve: &AffineCurve) -> Vec<f64> {
        vertex_residuals(curve, &self.params)
    }

    /// Gaps `λ_j = s_j − s_{j−1}` for `j = 1..=q`, with `s_q = s_0 + 1`.
    pub fn spacings(&self) -> Vec<f64> {
        let q = self.q;
        (1..=q)
            .map(|j| {
                let next = if j == q { self.params[0] + 1.0 } else { self.params[j] };
                next - self.params[j - 1]
            })
            .collect()
    }

    pub fn points(&self, curve: &AffineCurve) -> Vec<Vec2> {
        self.params.iter().map(|&s| curve.point(s)).collect()
    }
}

fn vertex_residuals(curve: &AffineCurve, params: &[f64]) -> Vec<f64> {
    let q = params.len();
    (0..q)
        .map(|j| {
            let prev = if j == 0 { params[q - 1] - 1.0 } else { params[j - 1] };
            let next = if j + 1 == q { params[0] + 1.0 } else { params[j + 1] };
            reflection_residual(curve, prev, params[j], next)
        })
        .collect()
}

/// Cyclic action `Σ ω(γ(s_j), γ(s_{j+1}))`; twice the polygon area for winding-one tuples.
pub fn action(curve: &AffineCurve, params: &[f64]) -> f64 {
    let pts: Vec<Vec2> = params.iter().map(|&s| curve.point(s)).collect();
    solver::action_of(&pts)
}

fn check_period(q: usize) -> Result<()> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("period must be at least 3, got {q}")));
    }
    Ok(())
}

/// Runs the ascent from `start` and from `opts.restarts` jittered copies of it.
fn search(
    curve: &AffineCurve,
    layout: &Layout,
    starts: Vec<Vec<f64>>,
    opts: &SolverOptions,
) -> Result<(Solution, usize)> {
    let q = layout.slots.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let jitter = 0.3 / q as f64;
    let mut all = starts.clone();
    for r in 0..opts.restarts {
        let base = &starts[r % starts.len()];
        all.push(base.iter().map(|v| v + rng.random_range(-jitter..jitter)).collect());
    }

    let mut best: Option<Solution> = None;
    let mut maxima: Vec<f64> = Vec::new();
    let mut first_err = None;
    for v0 in all {
        match ascend(curve, layout, v0, opts) {
            Ok(sol) => {
                let is_max = sol.top_curvature <= 1e-8 * sol.action.abs().max(1e-300);
                if is_max && !maxima.iter().any(|a| (a - sol.action).abs() <= 1e-12) {
                    maxima.push(sol.action);
                }
                if best.as_ref().is_none_or(|b| sol.action > b.action + 1e-15) {
                    best = Some(sol);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(sol) => {
            if maxima.len() > 1 {
                log::info!("q = {q}: {} distinct local maxima, keeping the largest", maxima.len());
            }
            Ok((sol, maxima.len().max(1)))
        }
        None => Err(first_err.expect("at least one start was tried")),
    }
}

fn axial_layout(q: usize) -> (Layout, Vec<f64>, Symmetry) {
    let k = q / 2;
    let even = q % 2 == 0;
    let nvar = if even { k - 1 } else { k };
    let mut slots = vec![Slot::Fixed(0.0); q];
    for j in 1..=nvar {
        slots[j] = Slot::Var { base: 0.0, sign: 1.0, idx: j - 1 };
        slots[q - j] = Slot::Var { base: 1.0, sign: -1.0, idx: j - 1 };
    }
    if even {
        slots[k] = Slot::Fixed(0.5);
    }
    let v0 = (1..=nvar).map(|j| j as f64 / q as f64).collect();
    let sym = if even { Symmetry::AxialEven } else { Symmetry::AxialOdd };
    (Layout { slots, nvar }, v0, sym)
}

/// Maximizer through the marked point `s = 0` of a curve symmetric about the
/// axis through `γ(0)` and `γ(1/2)`.
pub fn maximize_axial(curve: &AffineCurve, q: usize) -> Result<PeriodicOrbit> {
    maximize_axial_with(curve, q, &SolverOptions::default())
}

pub fn maximize_axial_with(curve: &AffineCurve, q: usize, opts: &SolverOptions) -> Result<PeriodicOrbit> {
    check_period(q)?;
    let (layout, v0, sym) = axial_layout(q);
    let (sol, n) = search(curve, &layout, vec![v0], opts)?;
    Ok(PeriodicOrbit::from_solution(curve, sol, sym, n))
}

/// Centrally symmetric maximizer, `s_{k+j} = s_j + 1/2` for `q = 2k`.
pub fn maximize_central(curve: &AffineCurve, q: usize) -> Result<PeriodicOrbit> {
    maximize_central_with(curve, q, &SolverOptions::default())
}

pub fn maximize_central_with(curve: &AffineCurve, q: usize, opts: &SolverOptions) -> Result<PeriodicOrbit> {
    check_period(q)?;
    if q % 2 != 0 {
        return Err(Error::InvalidArgument(format!("central orbits need an even period, got {q}")));
    }
    let k = q / 2;
    let mut slots = Vec::with_capacity(q);
    for j in 0..q {
        slots.push(Slot::Var {
            base: if j < k { 0.0 } else { 0.5 },
            sign: 1.0,
            idx: j % k,
        });
    }
    let v0 = (0..k).map(|j| j as f64 / q as f64).collect();
    let (sol, n) = search(curve, &Layout { slots, nvar: k }, vec![v0], opts)?;
    Ok(PeriodicOrbit::from_solution(curve, sol, Symmetry::Central, n))
}

/// Maximizer over all ordered tuples, or over those with `s_0 = pin`.
pub fn maximize_free(curve: &AffineCurve, q: usize, pin: Option<f64>) -> Result<PeriodicOrbit> {
    maximize_free_with(curve, q, pin, &SolverOptions::default())
}

pub fn maximize_free_with(
    curve: &AffineCurve,
    q: usize,
    pin: Option<f64>,
    opts: &SolverOptions,
) -> Result<PeriodicOrbit> {
    check_period(q)?;
    let (layout, starts) = match pin {
        Some(p) => {
            let p = p.rem_euclid(1.0);
            let mut slots = vec![Slot::Fixed(p)];
            slots.extend((1..q).map(|j| Slot::Var { base: 0.0, sign: 1.0, idx: j - 1 }));
            let v0 = (1..q).map(|j| p + j as f64 / q as f64).collect();
            (Layout { slots, nvar: q - 1 }, vec![v0])
        }
        None => {
            let slots = (0..q).map(|j| Slot::Var { base: 0.0, sign: 1.0, idx: j }).collect();
            // A few rotated starts; the first wins ties, so the circle keeps s_0 = 0.
            let starts = (0..4)
                .map(|r| {
                    let off = r as f64 / (4 * q) as f64;
                    (0..q).map(|j| off + j as f64 / q as f64).collect()
                })
                .collect();
            (Layout { slots, nvar: q }, starts)
        }
    };
    let (mut sol, n) = search(curve, &layout, starts, opts)?;
    // Report parameters with s_0 in [0, 1).
    let mut shift = sol.params[0].floor();
    if sol.params[0] - shift > 1.0 - 1e-12 {
        // Rounding just below an integer: report s_0 ≈ 0 rather than ≈ 1.
        shift += 1.0;
    }
    sol.params.iter_mut().for_each(|s| *s -= shift);
    Ok(PeriodicOrbit::from_solution(curve, sol, Symmetry::Free, n))
}

/// Dispatches on the orbit class.
pub fn maximize(curve: &AffineCurve, q: usize, class: OrbitClass, opts: &SolverOptions) -> Result<PeriodicOrbit> {
    match class {
        OrbitClass::Axial => maximize_axial_with(curve, q, opts),
        OrbitClass::Central => maximize_central_with(curve, q, opts),
        OrbitClass::Free => maximize_free_with(curve, q, None, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{unit_circle_radius, AffineTransform, CurveSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn circle() -> AffineCurve {
        AffineCurve::build(&CurveSpec::unit_circle(), 256).unwrap()
    }

    fn unit(spec: CurveSpec) -> AffineCurve {
        AffineCurve::build(&spec.normalize_unit_perimeter().unwrap(), 1024).unwrap()
    }

    fn polygon(q: usize) -> f64 {
        let r = unit_circle_radius();
        q as f64 * r * r * (TAU / q as f64).sin()
    }

    #[test]
    fn action_examples() {
        let c = circle();
        let tri: Vec<f64> = (0..3).map(|j| j as f64 / 3.0).collect();
        assert_relative_eq!(action(&c, &tri), 0.0104740, epsilon = 1e-7);
        let sq: Vec<f64> = (0..4).map(|j| j as f64 / 4.0).collect();
        assert_relative_eq!(action(&c, &sq), 0.0161258, epsilon = 1e-7);
        // A repeated vertex contributes a zero edge.
        let rep = [0.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
        assert_relative_eq!(action(&c, &rep), action(&c, &tri), epsilon = 1e-16);
    }

    #[test]
    fn circle_maximizers_are_regular_polygons() {
        let c = circle();
        let o = maximize_axial(&c, 4).unwrap();
        assert_relative_eq!(o.action, 4.0 * unit_circle_radius().powi(2), max_relative = 1e-12);
        for (j, s) in o.params.iter().enumerate() {
            assert_relative_eq!(*s, j as f64 / 4.0, epsilon = 1e-10);
        }
        let o = maximize_axial(&c, 5).unwrap();
        assert_relative_eq!(o.action, 0.0191706, epsilon = 1e-7);
        assert_eq!(o.symmetry, Symmetry::AxialOdd);
        let o = maximize_central(&c, 4).unwrap();
        assert_relative_eq!(o.action, polygon(4), max_relative = 1e-12);
        let o = maximize_free(&c, 5, Some(0.03)).unwrap();
        for (j, s) in o.params.iter().enumerate() {
            assert_relative_eq!(*s, 0.03 + j as f64 / 5.0, epsilon = 1e-10);
        }
        assert_relative_eq!(o.action, polygon(5), max_relative = 1e-12);
        let o = maximize_free(&c, 3, None).unwrap();
        assert_relative_eq!(o.action, 0.0104740, epsilon = 1e-7);
        assert!(o.params[0].abs() < 1e-12, "{:?}", o.params);
    }

    #[test]
    fn ellipse_central_orbits() {
        let e = unit(CurveSpec::ellipse(2.0, 1.0));
        let o = maximize_central(&e, 4).unwrap();
        assert_relative_eq!(o.action, 4.0 * TAU.powi(-3), max_relative = 1e-10);
        let o = maximize_central(&e, 6).unwrap();
        assert_relative_eq!(o.action, polygon(6), max_relative = 1e-10);
        assert!(o.max_residual <= 1e-10);
    }

    #[test]
    fn ellipse_free_action_ignores_pin() {
        let e = unit(CurveSpec::ellipse(1.5, 1.0));
        let a = maximize_free(&e, 6, Some(0.0)).unwrap().action;
        for pin in [0.1, 0.37, 0.9] {
            let b = maximize_free(&e, 6, Some(pin)).unwrap().action;
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn axial_perturbation_matches_free_search() {
        let c = unit(CurveSpec::radial(1.0, vec![0.0, 0.01, 0.005], vec![]));
        let o = maximize_axial(&c, 8).unwrap();
        assert!(o.max_residual <= 1e-10, "{}", o.max_residual);
        assert!((o.action - polygon(8)).abs() < 1e-3);
        let opts = SolverOptions {
            restarts: 20,
            ..Default::default()
        };
        let free = maximize_free_with(&c, 8, None, &opts).unwrap();
        assert!(free.action >= o.action - 1e-12);
        // The axial maximizer is a critical point of the full problem.
        assert!(o.residuals(&c).iter().all(|r| r.abs() <= 1e-10));
    }

    #[test]
    fn unimodular_invariance() {
        let base = CurveSpec::radial(1.0, vec![0.0, 0.02, 0.0, 0.01], vec![]).normalize_unit_perimeter().unwrap();
        let t = AffineTransform {
            matrix: [[0.8, -0.3], [0.4, (1.0 - 0.12) / 0.8]],
            shift: [0.1, 0.2],
        };
        let a = AffineCurve::build(&base, 1024).unwrap();
        let b = AffineCurve::build(&base.clone().transformed(t), 1024).unwrap();
        for q in [4, 6, 7] {
            assert_relative_eq!(
                maximize_axial(&a, q).unwrap().action,
                maximize_axial(&b, q).unwrap().action,
                epsilon = 1e-9
            );
            assert_relative_eq!(
                maximize_free(&a, q, None).unwrap().action,
                maximize_free(&b, q, None).unwrap().action,
                epsilon = 1e-9
            );
        }
        assert_relative_eq!(
            maximize_central(&a, 6).unwrap().action,
            maximize_central(&b, 6).unwrap().action,
            epsilon = 1e-9
        );
    }

    #[test]
    fn action_grows_with_period() {
        let c = unit(CurveSpec::radial(1.0, vec![0.0, 0.02, 0.01], vec![]));
        let mut last = 0.0;
        for q in 3..12 {
            let a = maximize_axial(&c, q).unwrap().action;
            assert!(a > last);
            assert!(a < 2.0 * c.area());
            last = a;
        }
    }

    #[test]
    fn invalid_periods() {
        let c = circle();
        assert!(matches!(maximize_central(&c, 5), Err(Error::InvalidArgument(_))));
        assert!(matches!(maximize_free(&c, 2, None), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn spacings_sum_to_one() {
        let c = unit(CurveSpec::radial(1.0, vec![0.03, 0.01], vec![0.0, 0.0, 0.01]));
        let o = maximize_free(&c, 9, None).unwrap();
        assert_relative_eq!(o.spacings().iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }
}
