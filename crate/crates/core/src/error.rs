use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model or box parameter is outside its admissible range.
    #[error("parameter `{name}` out of domain: {reason}")]
    ParameterDomain { name: &'static str, reason: String },

    /// The innovation law does not have the requested absolute moment.
    #[error("innovation law has no finite moment of order {order} (df = {df})")]
    MomentOrder { order: f64, df: f64 },

    /// A stationary-moment condition fails for the requested moment.
    #[error("moment condition violated: {0}")]
    MomentCondition(String),

    #[error("alpha = {alpha} lies outside the criterion domain ({lo}, {hi})")]
    OutsideDomain { alpha: f64, lo: f64, hi: f64 },

    #[error("non-finite value at alpha = {alpha}")]
    NonFinite { alpha: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Data for which the estimator is not defined (e.g. a path that is identically zero).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("power iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    GapFailure { iterations: usize, last_change: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("rate fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("{fallbacks} of {replications} replications needed a fallback seed")]
    DataQuality { fallbacks: usize, replications: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
