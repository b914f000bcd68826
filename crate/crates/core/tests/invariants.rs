use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;
use symbill::billiard::{reflection_residual, step, step_back, PhasePoint};
use symbill::cli::QRange;
use symbill::deformation::{circle_mode_identity, fourier_coeffs, FamilySymmetry};
use symbill::orbits::{action, maximize, OrbitClass, SolverOptions};
use symbill::trig::TrigSeries;
use symbill::{AffineCurve, AffineTransform, CurveSpec};

const N: usize = 256;

fn radial(cos: Vec<f64>, sin: Vec<f64>) -> AffineCurve {
    let spec = CurveSpec::radial(1.0, cos, sin).normalize_unit_perimeter().unwrap();
    AffineCurve::build(&spec, N).unwrap()
}

/// Small perturbations of the circle in modes 2 to 5.
fn near_circle() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    let modes = || prop::collection::vec(-0.008..0.008f64, 4).prop_map(|v| [vec![0.0], v].concat());
    (modes(), modes())
}

/// `R(θ) diag(a, 1/a) [[1, h], [0, 1]]` plus a translation.
fn unimodular() -> impl Strategy<Value = AffineTransform> {
    (0.0..TAU, 0.5..2.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(th, a, h, bx, by)| {
        let (c, s) = (th.cos(), th.sin());
        let m = [[a, a * h], [0.0, 1.0 / a]];
        AffineTransform {
            matrix: [
                [c * m[0][0] - s * m[1][0], c * m[0][1] - s * m[1][1]],
                [s * m[0][0] + c * m[1][0], s * m[0][1] + c * m[1][1]],
            ],
            shift: [bx, by],
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn billiard_step_reflects_and_inverts((cos, sin) in near_circle(), x in 0.0..1.0f64, gap in 0.08..0.42f64) {
        let curve = radial(cos, sin);
        let p = PhasePoint::new(x, x + gap);
        let next = step(&curve, p).unwrap();
        prop_assert!(reflection_residual(&curve, p.x, p.y, next.y).abs() <= 1e-12);
        let back = step_back(&curve, next).unwrap();
        let d = (back.x - p.x).rem_euclid(1.0);
        prop_assert!(d.min(1.0 - d) <= 1e-10, "{back:?} vs {p:?}");
        prop_assert!((back.y - back.x - gap).abs() <= 1e-10);
    }

    #[test]
    fn unimodular_maps_keep_actions_and_curvature((cos, sin) in near_circle(), t in unimodular(), q in 3usize..8) {
        let spec = CurveSpec::radial(1.0, cos, sin).normalize_unit_perimeter().unwrap();
        let a = AffineCurve::build(&spec, N).unwrap();
        let b = AffineCurve::build(&spec.clone().transformed(t), N).unwrap();
        for s in [0.0, 0.21, 0.66] {
            assert_relative_eq!(a.affine_curvature(s), b.affine_curvature(s), max_relative = 1e-9);
        }
        assert_relative_eq!(a.area(), b.area(), max_relative = 1e-12);
        let opts = SolverOptions::default();
        let da = maximize(&a, q, OrbitClass::Free, &opts).unwrap().action;
        let db = maximize(&b, q, OrbitClass::Free, &opts).unwrap().action;
        assert_relative_eq!(da, db, max_relative = 1e-9);
    }

    #[test]
    fn maximizers_reflect_everywhere((cos, sin) in near_circle(), q in 3usize..10) {
        let curve = radial(cos, sin);
        let orbit = maximize(&curve, q, OrbitClass::Free, &SolverOptions::default()).unwrap();
        prop_assert!(orbit.max_residual <= 1e-10);
        for w in orbit.params.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        prop_assert!(orbit.params[q - 1] < orbit.params[0] + 1.0);
        // Any other inscribed q-gon, e.g. equally spaced vertices, does no better.
        for shift in [0.0, 0.37] {
            let even: Vec<f64> = (0..q).map(|j| shift + j as f64 / q as f64).collect();
            prop_assert!(action(&curve, &even) <= orbit.action + 1e-14);
        }
    }

    #[test]
    fn circle_mode_identity_on_band_limited_samples(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=16),
        q in 3usize..=16,
    ) {
        let mut c: Vec<Complex64> = coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        c[0].im = 0.0;
        let u = TrigSeries::from_coeffs(c).samples(128);
        let (left, right) = circle_mode_identity(&u, q).unwrap();
        prop_assert!((left - right).abs() <= 1e-10 * (1.0 + left.abs()), "{left} vs {right}");
    }

    #[test]
    fn even_samples_have_real_coefficients(a in prop::collection::vec(-1.0..1.0f64, 8)) {
        let u: Vec<f64> = (0..128)
            .map(|i| {
                let x = i as f64 / 128.0;
                a.iter().enumerate().map(|(k, ak)| ak * (TAU * k as f64 * x).cos()).sum()
            })
            .collect();
        let s = fourier_coeffs(&u, 16, Some(FamilySymmetry::Axial)).unwrap();
        prop_assert!(s.symmetric(1e-13));
        prop_assert!(!s.aliasing);
    }

    #[test]
    fn doubling_periods_stay_in_range(lo in 3usize..64, span in 0usize..400) {
        let hi = (lo + span).min(512);
        let r: QRange = format!("{lo}:{hi}").parse().unwrap();
        let qs = r.doubling();
        prop_assert_eq!(qs[0], lo);
        prop_assert!(qs.iter().all(|q| *q <= hi));
        prop_assert!(qs.windows(2).all(|w| w[1] == 2 * w[0]));
        prop_assert!(qs.last().unwrap() * 2 > hi);
    }

    #[test]
    fn csv_floats_round_trip(v in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let mut t = symbill::cli::output::Table::new("t", &["v"]);
        t.push(vec![v.into()]);
        let csv = t.render_csv();
        let back: f64 = csv.lines().nth(1).unwrap().parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }
}
