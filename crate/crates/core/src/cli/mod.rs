//! Command-line front end: argument parsing, subcommand dispatch and output.

pub mod output;
pub mod plot;

use crate::curve::{AffineCurve, CurveSpec};
use crate::deformation::{
    fourier_coeffs, normalize_axial_family, normalize_radon_family, rigidity_row, DeformationField, DomainFamily,
    FamilySymmetry, DEFAULT_H_TAU,
};
use crate::error::{Error, Result};
use crate::expansion::{residual_order, Quantity};
use crate::orbits::{four_orbit_residual, integrability_probe, maximize, maximize_free_with, radon_anchor, OrbitClass, SolverOptions};
use crate::spectrum::{fit_beta, spectrum_table};
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{Report, Table};
use rayon::prelude::*;
use std::path::PathBuf;

pub use output::Format;

pub const MIN_Q: usize = 3;
pub const MAX_Q: usize = 512;
pub const MIN_SAMPLES: usize = 256;
pub const MAX_SAMPLES: usize = 65536;

/// Symplectic billiard computations on convex curves.
#[derive(Debug, Parser)]
#[command(name = "symbill", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Uniform affine-parameter samples per curve (power of two).
    #[arg(long, global = true, default_value_t = 4096)]
    pub samples: usize,
    /// Sup-norm target on reflection residuals.
    #[arg(long, global = true, default_value_t = 1e-11)]
    pub tol: f64,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "SYMBILL_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Axial,
    Central,
    Free,
}

impl From<ClassArg> for OrbitClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Axial => OrbitClass::Axial,
            ClassArg::Central => OrbitClass::Central,
            ClassArg::Free => OrbitClass::Free,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    /// Axial frame for axial families, Radon frame for central ones.
    Auto,
    None,
    Axial,
    Radon,
}

/// Inclusive period range `A:B`, or a single period `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRange {
    pub lo: usize,
    pub hi: usize,
}

impl std::str::FromStr for QRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a period"));
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let q = num(s)?;
                (q, q)
            }
        };
        if lo < MIN_Q || hi > MAX_Q || lo > hi {
            return Err(format!("period range {lo}:{hi} must satisfy {MIN_Q} <= A <= B <= {MAX_Q}"));
        }
        Ok(Self { lo, hi })
    }
}

impl QRange {
    pub fn all(&self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }

    /// `A, 2A, 4A, …` up to `B`.
    pub fn doubling(&self) -> Vec<usize> {
        std::iter::successors(Some(self.lo), |q| Some(q * 2)).take_while(|q| *q <= self.hi).collect()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Affine perimeter, area, affine curvature range and distance from a conic.
    CurveInfo {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Maximizing periodic orbits with their residuals.
    Orbit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "4")]
        q: QRange,
        #[arg(long, value_enum, default_value_t = ClassArg::Free)]
        symmetry: ClassArg,
        /// Fix the first vertex (free class only).
        #[arg(long)]
        pin: Option<f64>,
    },
    /// Table of Δ_q and β(1/q), and the four-term fit of q·β when the range allows it.
    Spectrum {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "10:60")]
        q: QRange,
        #[arg(long, value_enum, default_value_t = ClassArg::Free)]
        symmetry: ClassArg,
    },
    /// Decay of measured-minus-predicted residuals on a doubling set of periods.
    Expansion {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "8:64")]
        q: QRange,
        /// Quantities to measure; all when omitted.
        #[arg(long, value_delimiter = ',')]
        quantity: Vec<String>,
    },
    /// Radon anchor, four-orbit map on a grid and integrability probes.
    Radon {
        #[arg(long)]
        spec: PathBuf,
        /// Probe periods; odd ones are skipped.
        #[arg(long, default_value = "4:8")]
        q: QRange,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Deformation function, Fourier coefficients and rigidity rows of a family.
    Deform {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value = "3:8")]
        q: QRange,
        /// Fourier truncation; defaults to max(32, 4·B).
        #[arg(long)]
        k_max: Option<usize>,
        /// Family parameter; defaults to the base member.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, value_enum, default_value_t = FrameArg::Auto)]
        frame: FrameArg,
        /// Points of the n table.
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CurveInfo { .. } => "curve-info",
            Command::Orbit { .. } => "orbit",
            Command::Spectrum { .. } => "spectrum",
            Command::Expansion { .. } => "expansion",
            Command::Radon { .. } => "radon",
            Command::Deform { .. } => "deform",
        }
    }
}

impl Common {
    pub fn validate(&self) -> Result<()> {
        if !self.samples.is_power_of_two() || !(MIN_SAMPLES..=MAX_SAMPLES).contains(&self.samples) {
            return Err(Error::InvalidArgument(format!(
                "--samples {} must be a power of two in [{MIN_SAMPLES}, {MAX_SAMPLES}]",
                self.samples
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("--tol {} must be positive", self.tol)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        Ok(())
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            ..SolverOptions::default()
        }
    }
}

/// Loads a spec and rescales it to unit affine perimeter.
fn load_curve(path: &PathBuf, n: usize) -> Result<(CurveSpec, AffineCurve)> {
    let raw = CurveSpec::load(path)?;
    let unit = raw.normalize_unit_perimeter()?;
    if unit != raw {
        log::info!("rescaled {} to unit affine perimeter", path.display());
    }
    let curve = AffineCurve::build(&unit, n)?;
    Ok((raw, curve))
}

/// Runs one subcommand and returns its tables.
pub fn execute(command: &Command, common: &Common) -> Result<Report> {
    common.validate()?;
    let n = common.samples;
    let opts = common.solver();
    match command {
        Command::CurveInfo { spec } => curve_info(spec, n),
        Command::Orbit { spec, q, symmetry, pin } => orbit(spec, n, *q, (*symmetry).into(), *pin, &opts),
        Command::Spectrum { spec, q, symmetry } => spectrum(spec, n, *q, (*symmetry).into(), &opts),
        Command::Expansion { spec, q, quantity } => expansion(spec, n, *q, quantity, &opts),
        Command::Radon { spec, q, grid } => radon(spec, n, *q, *grid, &opts),
        Command::Deform {
            family,
            q,
            k_max,
            tau,
            frame,
            points,
        } => deform(family, n, *q, *k_max, *tau, *frame, *points, &opts),
    }
}

/// Sets up the thread pool, runs and writes output. The caller maps errors to exit codes.
pub fn run(cli: &Cli) -> Result<()> {
    let report = match cli.common.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| execute(&cli.command, &cli.common))?,
        None => execute(&cli.command, &cli.common)?,
    };
    if cli.common.format == Format::Svg && report.plot.is_none() {
        return Err(Error::InvalidArgument(format!("`{}` has no plot; use table or csv", cli.command.name())));
    }
    match &cli.common.out {
        Some(dir) => {
            for path in report.write(dir, cli.command.name(), cli.common.format)? {
                log::info!("wrote {}", path.display());
            }
        }
        None => print!("{}", report.render(cli.common.format)),
    }
    Ok(())
}

/// Machine-readable error record for stderr.
pub fn error_record(err: &Error) -> (i32, String) {
    let code = exit_code(err);
    let record = serde_json::json!({
        "error": err.kind(),
        "message": err.to_string(),
        "exit_code": code,
    });
    (code, record.to_string())
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

fn curve_info(path: &PathBuf, n: usize) -> Result<Report> {
    let (raw, curve) = load_curve(path, n)?;
    let k: Vec<f64> = curve.grid().map(|s| curve.affine_curvature(s)).collect();
    let k_min = k.iter().cloned().fold(f64::INFINITY, f64::min);
    let k_max = k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pairs = vec![
        ("affine_perimeter", raw.affine_perimeter()?.into()),
        ("area", curve.area().into()),
        ("k_min", k_min.into()),
        ("k_max", k_max.into()),
        ("k_mean", curve.mean_affine_curvature().into()),
        ("circle_distance", curve.circle_distance().into()),
        ("frame_residual", curve.frame_residuals().max().into()),
        ("samples", n.into()),
    ];
    Ok(Report {
        tables: vec![Table::summary("curve_info", pairs)],
        plot: None,
    })
}

fn orbit(path: &PathBuf, n: usize, q: QRange, class: OrbitClass, pin: Option<f64>, opts: &SolverOptions) -> Result<Report> {
    if pin.is_some() && class != OrbitClass::Free {
        return Err(Error::InvalidArgument("--pin applies to the free class only".into()));
    }
    if class == OrbitClass::Central && q.all().iter().any(|q| q % 2 == 1) {
        return Err(Error::InvalidArgument("central orbits need even periods".into()));
    }
    let (_, curve) = load_curve(path, n)?;
    let orbits = q
        .all()
        .into_par_iter()
        .map(|q| match pin {
            Some(p) => maximize_free_with(&curve, q, Some(p), opts),
            None => maximize(&curve, q, class, opts),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("orbit", &["q", "symmetry", "action", "residual", "iterations", "params"]);
    for o in orbits {
        let sym = serde_json::to_value(o.symmetry)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let params: Vec<String> = o.params.iter().map(|p| format!("{p:.16e}")).collect();
        table.push(vec![
            o.q.into(),
            sym.into(),
            o.action.into(),
            o.max_residual.into(),
            o.iterations.into(),
            params.join(" ").into(),
        ]);
    }
    Ok(Report {
        tables: vec![table],
        plot: None,
    })
}

fn spectrum(path: &PathBuf, n: usize, q: QRange, class: OrbitClass, opts: &SolverOptions) -> Result<Report> {
    let (_, curve) = load_curve(path, n)?;
    let rows = spectrum_table(&curve, q.lo, q.hi, class, opts)?;
    let mut table = Table::new("spectrum", &["q", "delta", "beta", "residual"]);
    for r in &rows {
        table.push(vec![r.q.into(), r.delta.into(), r.beta.into(), r.residual.into()]);
    }
    let mut tables = vec![table];
    if rows.len() >= 9 {
        let fit = fit_beta(&rows)?;
        tables.push(Table::summary(
            "beta_fit",
            vec![
                ("q_min", fit.q_min.into()),
                ("q_max", fit.q_max.into()),
                ("beta1", fit.beta1.into()),
                ("beta3", fit.beta3.into()),
                ("beta5", fit.beta5.into()),
                ("beta7", fit.beta7.into()),
                ("residual", fit.residual.into()),
                ("condition", fit.condition.into()),
            ],
        ));
    } else {
        log::info!("skipping the beta fit: {} periods, need at least 9", rows.len());
    }
    Ok(Report { tables, plot: None })
}

fn expansion(path: &PathBuf, n: usize, q: QRange, names: &[String], opts: &SolverOptions) -> Result<Report> {
    let quantities: Vec<Quantity> = if names.is_empty() {
        vec![Quantity::Lambda, Quantity::S, Quantity::Chord]
    } else {
        names.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let qs = q.doubling();
    if qs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "{}:{} holds fewer than two doubling periods",
            q.lo, q.hi
        )));
    }
    let (_, curve) = load_curve(path, n)?;
    let reports = quantities
        .iter()
        .map(|&qty| residual_order(&curve, qty, &qs, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Table::new("expansion", &["quantity", "q", "max_residual", "included", "slope"]);
    let mut fits = Table::new("expansion_slopes", &["quantity", "slope", "half_width", "reliable", "circle_distance"]);
    let mut series = Vec::new();
    for r in &reports {
        for ((q, res), inc) in r.qs.iter().zip(&r.residuals).zip(&r.included) {
            rows.push(vec![r.quantity.to_string().into(), (*q).into(), (*res).into(), (*inc).into(), r.slope.into()]);
        }
        fits.push(vec![
            r.quantity.to_string().into(),
            r.slope.into(),
            r.half_width.into(),
            r.slope_reliable.into(),
            r.circle_distance.into(),
        ]);
        series.push(plot::Series {
            label: format!("{} ({:.2})", r.quantity, r.slope),
            points: r.qs.iter().map(|&q| q as f64).zip(r.residuals.iter().cloned()).collect(),
        });
    }
    Ok(Report {
        tables: vec![rows, fits],
        plot: Some(plot::loglog("expansion residuals", "q", "max residual", &series)),
    })
}

fn radon(path: &PathBuf, n: usize, q: QRange, grid: usize, opts: &SolverOptions) -> Result<Report> {
    if grid == 0 {
        return Err(Error::InvalidArgument("--grid must be positive".into()));
    }
    let (_, curve) = load_curve(path, n)?;
    let anchor = match radon_anchor(&curve) {
        Ok(a) => a,
        Err(e @ Error::NotRadon { .. }) => {
            log::warn!("no Radon anchor: {e}");
            f64::NAN
        }
        Err(e) => return Err(e),
    };
    let configs = (0..grid)
        .into_par_iter()
        .map(|i| four_orbit_residual(&curve, i as f64 / grid as f64))
        .collect::<Result<Vec<_>>>()?;
    let mut map = Table::new("radon_map", &["s", "phi", "phi_gap", "radon_residual"]);
    let mut worst: f64 = 0.0;
    for c in &configs {
        let gap = c.phi - c.s - 0.25;
        worst = worst.max(gap.abs());
        map.push(vec![c.s.into(), c.phi.into(), gap.into(), c.radon_residual.into()]);
    }
    let even: Vec<usize> = q.all().into_iter().filter(|q| q % 2 == 0).collect();
    let mut probes = Table::new("radon_probe", &["q", "central_action", "max_deviation", "pins", "failures"]);
    for q in even {
        let p = integrability_probe(&curve, q, opts)?;
        probes.push(vec![
            q.into(),
            p.central_action.into(),
            p.max_deviation.into(),
            p.pinned.len().into(),
            p.failures.len().into(),
        ]);
    }
    let summary = Table::summary("radon", vec![("anchor", anchor.into()), ("max_phi_gap", worst.into())]);
    Ok(Report {
        tables: vec![summary, map, probes],
        plot: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn deform(
    path: &PathBuf,
    n: usize,
    q: QRange,
    k_max: Option<usize>,
    tau: Option<f64>,
    frame: FrameArg,
    points: usize,
    opts: &SolverOptions,
) -> Result<Report> {
    if points == 0 {
        return Err(Error::InvalidArgument("--points must be positive".into()));
    }
    let raw = DomainFamily::load(path)?;
    raw.validate()?;
    let frame = match frame {
        FrameArg::Auto => match raw.symmetry {
            FamilySymmetry::Axial => FrameArg::Axial,
            FamilySymmetry::Central => FrameArg::Radon,
        },
        f => f,
    };
    let mut tables = Vec::new();
    let family = match frame {
        FrameArg::Axial => normalize_axial_family(&raw, n)?,
        FrameArg::Radon => {
            let (fam, landing) = normalize_radon_family(&raw, n)?;
            let mut t = Table::new("deform_landing", &["tau", "landing"]);
            for (tau, y) in landing.taus.iter().zip(&landing.landing) {
                t.push(vec![(*tau).into(), (*y).into()]);
            }
            tables.push(t);
            fam
        }
        _ => raw,
    };
    let tau = tau.unwrap_or_else(|| family.base_tau());
    let k_max = k_max.unwrap_or((4 * q.hi).max(32));

    let field = DeformationField::new(&family, tau, DEFAULT_H_TAU, n)?;
    let mut n_table = Table::new("deform_n", &["s", "n", "u"]);
    for i in 0..points {
        let s = i as f64 / points as f64;
        n_table.push(vec![s.into(), field.n(s).into(), field.u(s).into()]);
    }

    let samples = (4 * k_max).max(n).next_power_of_two();
    let u = field.u_samples(samples);
    let series = fourier_coeffs(&u, k_max, Some(family.symmetry))?;
    let mut fourier = Table::new("deform_fourier", &["k", "re", "im", "abs"]);
    for (k, c) in series.coeffs.iter().enumerate() {
        fourier.push(vec![k.into(), c.re.into(), c.im.into(), c.norm().into()]);
    }

    let class = family.symmetry.orbit_class();
    let rows = q
        .all()
        .into_par_iter()
        .map(|q| rigidity_row(field.curve(), &u, q, k_max, class, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut rigidity = Table::new("deform_rigidity", &["q", "fourier_side", "direct_side", "gap"]);
    for r in rows {
        rigidity.push(vec![r.q.into(), r.fourier_side.into(), r.direct_side.into(), r.gap.into()]);
    }
    tables.extend([n_table, fourier, rigidity]);
    Ok(Report { tables, plot: None })
}
