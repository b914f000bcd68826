//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::Instant;
use symbill::curve::unit_circle_radius;
use symbill::deformation::{
    circle_mode_identity, fourier_coeffs, isospectral_residual, normalize_axial_family, normalize_radon_family,
    DeformationField, DomainFamily, FamilySymmetry, DEFAULT_H_TAU,
};
use symbill::expansion::{loglog_slope, predict_chord, residual_order, Quantity};
use symbill::orbits::{four_orbit_map, integrability_probe, maximize, OrbitClass, SolverOptions};
use symbill::spectrum::fit_beta_coeffs;
use symbill::trig::TrigSeries;
use symbill::{AffineCurve, AffineTransform, CurveSpec, Result};

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn circle(n: usize) -> AffineCurve {
    AffineCurve::build(&CurveSpec::unit_circle(), n).unwrap()
}

fn circle_delta(q: usize) -> f64 {
    let r = unit_circle_radius();
    q as f64 * r * r * (TAU / q as f64).sin()
}

fn unit_ellipse() -> CurveSpec {
    CurveSpec::ellipse(2.0, 0.5).normalize_unit_perimeter().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn circle_oracle() -> Result<Outcome> {
    let start = Instant::now();
    let c = circle(1024);
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    for q in 3..=64 {
        let d = maximize(&c, q, OrbitClass::Free, &opts)?.action;
        worst = worst.max(rel(d, circle_delta(q)));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs <= 60.0,
        format!("max relative error {worst:.2e} over q = 3..64 in {secs:.2} s"),
    )
}

fn beta_recovery() -> Result<Outcome> {
    let fit = fit_beta_coeffs(&circle(1024), 10, 60, OrbitClass::Free, &SolverOptions::default())?;
    let e1 = rel(fit.beta1, -1.0 / (4.0 * PI * PI));
    let e3 = rel(fit.beta3, 1.0 / 6.0);
    let e5 = rel(fit.beta5, -TAU * TAU / 120.0);
    outcome(
        e1 <= 1e-6 && e3 <= 1e-5 && e5 <= 1e-3,
        format!("relative errors beta1 {e1:.2e}, beta3 {e3:.2e}, beta5 {e5:.2e}"),
    )
}

/// `R(θ) diag(a, 1/a) [[1, h], [0, 1]]` plus a translation.
fn random_unimodular(rng: &mut ChaCha8Rng) -> AffineTransform {
    let th = rng.random_range(0.0..TAU);
    let a: f64 = rng.random_range(0.5..2.0);
    let h: f64 = rng.random_range(-1.0..1.0);
    let (c, s) = (th.cos(), th.sin());
    let m = [[a, a * h], [0.0, 1.0 / a]];
    AffineTransform {
        matrix: [
            [c * m[0][0] - s * m[1][0], c * m[0][1] - s * m[1][1]],
            [s * m[0][0] + c * m[1][0], s * m[0][1] + c * m[1][1]],
        ],
        shift: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
    }
}

fn affine_invariance() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = SolverOptions::default();
    let c = circle(1024);
    let reference: Vec<f64> = (3..=12)
        .map(|q| Ok(maximize(&c, q, OrbitClass::Free, &opts)?.action))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let spec = unit_ellipse().transformed(random_unimodular(&mut rng));
        let curve = AffineCurve::build(&spec, 1024)?;
        for (i, q) in (3..=12).enumerate() {
            let d = maximize(&curve, q, OrbitClass::Free, &opts)?.action;
            worst = worst.max((d - reference[i]).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max |delta_q - circle| {worst:.2e} over 3 transforms, q = 3..12"))
}

fn expansion_orders() -> Result<Outcome> {
    let spec = CurveSpec::radial(1.0, vec![0.0, 0.0, 5e-9], vec![]).normalize_unit_perimeter()?;
    let curve = AffineCurve::build(&spec, 2048)?;
    let qs = [8, 16, 32, 64];
    let opts = SolverOptions::default();
    let lam = residual_order(&curve, Quantity::Lambda, &qs, &opts)?;
    let s = residual_order(&curve, Quantity::S, &qs, &opts)?;
    let ok = (-5.5..=-4.5).contains(&lam.slope) && (-4.5..=-3.5).contains(&s.slope);
    outcome(
        ok,
        format!(
            "circle distance {:.3e}; lambda slope {:.3} ± {:.2}, s slope {:.3} ± {:.2}",
            lam.circle_distance, lam.slope, lam.half_width, s.slope, s.half_width
        ),
    )
}

fn chord_expansion() -> Result<Outcome> {
    let c = circle(1024);
    let r = unit_circle_radius();
    let qs: Vec<usize> = (8..=64).collect();
    let errors: Vec<f64> = qs
        .iter()
        .map(|&q| {
            let exact = 2.0 * r * (TAU / q as f64).sin();
            (0..q).map(|j| (predict_chord(&c, q, j) - exact).abs()).fold(0.0, f64::max)
        })
        .collect();
    let x: Vec<f64> = qs.iter().map(|&q| (q as f64).ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (slope, hw) = loglog_slope(&x, &y);
    outcome(slope <= -4.5, format!("chord error slope {slope:.3} ± {hw:.3} over q = 8..64"))
}

fn envelope_identity() -> Result<Outcome> {
    let h = 1e-4;
    let n = 1024;
    let opts = SolverOptions::default();
    let base = CurveSpec::radial(1.0, vec![0.0, 0.004, 0.0, 0.002], vec![]);
    let mut generic = DomainFamily::new(base.clone(), FamilySymmetry::Axial)
        .with_velocities(vec![0.0, 0.006, 0.004, -0.003, 0.002, 0.0015, -0.001, 0.0008], vec![]);
    generic.tau_range = [-0.2, 0.2];
    let generic = normalize_axial_family(&generic, n)?;
    let shear = DomainFamily::new(base, FamilySymmetry::Axial).with_motion([[0.0, 1.0], [0.0, 0.0]], [0.0, 0.0]);

    let bound = 1e-6 + 10.0 * h * h;
    let (mut worst, mut flat) = (0.0f64, 0.0f64);
    for q in 4..=16 {
        let g = isospectral_residual(&generic, q, 0.0, h, n, &opts)?;
        worst = worst.max(g.residual);
        let s = isospectral_residual(&shear, q, 0.0, h, n, &opts)?;
        flat = flat.max(s.finite_difference.abs()).max(s.spectral_sum.abs());
    }
    outcome(
        worst <= bound && flat <= 1e-8,
        format!("generic max residual {worst:.2e} (bound {bound:.2e}); shear max |value| {flat:.2e}"),
    )
}

fn radon_integrability() -> Result<Outcome> {
    let opts = SolverOptions::default();
    let ellipse = AffineCurve::build(&unit_ellipse(), 1024)?;
    let mut phi_gap: f64 = 0.0;
    for i in 0..64 {
        let s = i as f64 / 64.0;
        phi_gap = phi_gap.max((four_orbit_map(&ellipse, s)? - s - 0.25).abs());
    }
    let mut probe: f64 = 0.0;
    let mut probe6 = 0.0;
    for q in [4, 6, 8] {
        let p = integrability_probe(&ellipse, q, &opts)?;
        probe = probe.max(p.max_deviation);
        if q == 6 {
            probe6 = p.max_deviation;
        }
    }
    let bumpy = CurveSpec::radial(1.0, vec![0.0, 0.0, 0.0, 1e-2], vec![]).normalize_unit_perimeter()?;
    let bumpy6 = integrability_probe(&AffineCurve::build(&bumpy, 1024)?, 6, &opts)?.max_deviation;
    outcome(
        phi_gap <= 1e-8 && probe <= 1e-8 && bumpy6 >= 10.0 * probe6,
        format!("ellipse phi gap {phi_gap:.2e}, probe {probe:.2e}; perturbed q = 6 probe {bumpy6:.2e} vs {probe6:.2e}"),
    )
}

fn circle_modes() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut coeffs: Vec<num_complex::Complex64> = (0..=32)
        .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    coeffs[0].im = 0.0;
    let u = TrigSeries::from_coeffs(coeffs).samples(256);
    let mut worst: f64 = 0.0;
    for q in 3..=16 {
        let (l, r) = circle_mode_identity(&u, q)?;
        worst = worst.max((l - r).abs());
    }
    outcome(worst <= 1e-10, format!("max |left - right| {worst:.2e} for K = 32, q = 3..16"))
}

fn fourier_symmetry() -> Result<Outcome> {
    let n = 1024;
    let axial = DomainFamily::new(CurveSpec::radial(1.0, vec![0.0, 0.005, 0.002], vec![]), FamilySymmetry::Axial)
        .with_velocities(vec![0.0, 0.003, -0.002, 0.004, 0.001], vec![]);
    let axial = normalize_axial_family(&axial, n)?;
    let f = DeformationField::new(&axial, 0.0, DEFAULT_H_TAU, n)?;
    let a = fourier_coeffs(&f.u_samples(n), 64, Some(FamilySymmetry::Axial))?;
    let ends = f.u(0.0).abs().max(f.u(0.5).abs());

    // A Radon frame needs a 4-orbit with quarter spacing; mirror-symmetric
    // central curves and their affine images have one.
    let skew = AffineTransform::linear([[1.2, 0.3], [0.1, 0.9]]);
    let central = DomainFamily::new(
        CurveSpec::radial(1.0, vec![0.0, 0.004, 0.0, 0.003], vec![]).transformed(skew),
        FamilySymmetry::Central,
    )
    .with_velocities(vec![0.0, 0.002, 0.0, -0.003, 0.0, 0.001], vec![]);
    let (central, _) = normalize_radon_family(&central, n)?;
    let g = DeformationField::new(&central, 0.0, DEFAULT_H_TAU, n)?;
    let c = fourier_coeffs(&g.u_samples(n), 64, Some(FamilySymmetry::Central))?;
    outcome(
        a.max_imag <= 1e-9 && ends <= 1e-9 && c.max_odd <= 1e-10,
        format!(
            "axial max |Im u_k| {:.2e}, |u(0)|, |u(1/2)| <= {ends:.2e}; central max |u_odd| {:.2e}",
            a.max_imag, c.max_odd
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("circle polygon oracle", circle_oracle),
        ("beta coefficient recovery", beta_recovery),
        ("equi-affine invariance", affine_invariance),
        ("expansion orders", expansion_orders),
        ("chord expansion", chord_expansion),
        ("envelope identity", envelope_identity),
        ("Radon map and integrability probe", radon_integrability),
        ("circle mode identity", circle_modes),
        ("Fourier symmetry", fourier_symmetry),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} {}. {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
