use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("boundary is not strictly convex: curvature {value:e} at theta = {theta}")]
    NonConvex { theta: f64, value: f64 },

    #[error("invalid curve spec: {0}")]
    InvalidSpec(String),

    #[error("sample count {n} is below the minimum of {min}")]
    TooFewSamples { n: usize, min: usize },

    #[error("curve must have unit affine perimeter, got {perimeter}")]
    NotNormalized { perimeter: f64 },

    #[error("derivative order {0} not available (max 3)")]
    DerivativeOrder(usize),

    #[error("root finding failed for {what} near s = {near}")]
    RootNotFound { what: &'static str, near: f64 },

    #[error("phase point ({x}, {y}) is not in the open positive phase space (separation {separation:e})")]
    OutsidePhaseSpace { x: f64, y: f64, separation: f64 },

    #[error("orbit search for q = {q} stagnated after {iterations} iterations (residual {residual:e})")]
    Stagnation {
        q: usize,
        iterations: usize,
        residual: f64,
        params: Vec<f64>,
    },

    #[error("orbit search for q = {q} collapsed the vertex ordering")]
    OrderingCollapse { q: usize, params: Vec<f64> },

    #[error("curve is not Radon at s = {s}: 4-orbit residual {residual:e}")]
    NotRadon { s: f64, residual: f64 },

    #[error("no symmetry axis through the marked point (mismatch {mismatch:e})")]
    AxisNotFound { mismatch: f64 },

    #[error("curve is not centrally symmetric (mismatch {mismatch:e})")]
    NotCentral { mismatch: f64 },

    #[error("auxiliary abscissa {0} is not positive")]
    NonPositiveAuxiliary(f64),

    #[error("beta fit is ill-conditioned (condition {condition:e})")]
    IllConditionedFit { condition: f64 },

    #[error("isospectral family violates the Radon normalization: y-landing varies by {variation:e}")]
    IsospectralViolation { variation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RootNotFound { .. }
                | Error::Stagnation { .. }
                | Error::OrderingCollapse { .. }
                | Error::NotRadon { .. }
                | Error::IllConditionedFit { .. }
                | Error::IsospectralViolation { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvex { .. } => "non_convex",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::NotNormalized { .. } => "not_normalized",
            Error::DerivativeOrder(_) => "derivative_order",
            Error::RootNotFound { .. } => "root_not_found",
            Error::OutsidePhaseSpace { .. } => "outside_phase_space",
            Error::Stagnation { .. } => "stagnation",
            Error::OrderingCollapse { .. } => "ordering_collapse",
            Error::NotRadon { .. } => "not_radon",
            Error::AxisNotFound { .. } => "axis_not_found",
            Error::NotCentral { .. } => "not_central",
            Error::NonPositiveAuxiliary(_) => "non_positive_auxiliary",
            Error::IllConditionedFit { .. } => "ill_conditioned_fit",
            Error::IsospectralViolation { .. } => "isospectral_violation",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}
