use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("p = n/(n-2) (border case) is not supported")]
    BorderCase,
    #[error("parameters outside condition (P): p = {p}, admissible ranges are ({p_n}, {border}) and ({border}, {upper})")]
    OutsideConditionP {
        p: f64,
        p_n: f64,
        border: f64,
        upper: f64,
    },
    #[error("adaptive integrator failed at r = {r}: {reason}")]
    StepFailure { r: f64, reason: String },
    #[error("no change of shooting classification found for v0 in [{lo}, {hi}]")]
    BracketingFailure { lo: f64, hi: f64 },
    #[error("profile is not strictly positive and decreasing near r = {r}")]
    MonotonicityViolation { r: f64 },
    #[error("tail fit window [{lo}, {hi}] spans less than one decade")]
    WindowTooNarrow { lo: f64, hi: f64 },
    #[error("tail fit residual {residual:.3e} exceeds {limit:.3e}")]
    PoorFit { residual: f64, limit: f64 },
    #[error("tail integral diverges: {0}")]
    TailDivergent(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergent(String),
    #[error("odd integral {value:.3e} exceeds 10x its error estimate {estimate:.3e}")]
    QuadratureAsymmetry { value: f64, estimate: f64 },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
