use thiserror::Error;

/// Errors raised by the geometric and numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not a hyperbolic point of the form")]
    NotHyperbolic { x: f64, y: f64 },

    #[error("form takes the non-positive value {value} at the chosen point")]
    NonPositiveValue { value: f64 },

    #[error("slope parameter T = {t} lies outside dom = ({lo}, {hi})")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("argument {value} outside the domain of {what}")]
    DomainError { what: &'static str, value: f64 },

    #[error("metric coefficient undefined at t = {t}: the slice polynomial vanishes there")]
    DivisionByZeroAtLevelSetBoundary { t: f64 },

    #[error("boundary roots {f_root} (slice) and {metric_root} (metric) are closer than the separation tolerance")]
    BoundaryAmbiguous { f_root: f64, metric_root: f64 },

    #[error("integration did not reach the section: {0}")]
    ConvergenceFailure(String),

    #[error("factor-form reduction failed: {0}")]
    ReductionFailure(String),

    #[error("automorphism generator does not preserve the form (residual {residual:e})")]
    VerificationFailure { residual: f64 },

    #[error("comparison is inconclusive: {0}")]
    Inconclusive(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
