use thiserror::Error;

/// Errors produced by the series calculus and its consumers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("incompatible series: {0}")]
    IncompatibleSeries(String),
    #[error("series is not invertible: constant term is zero")]
    NotInvertible,
    #[error("constant term must be 1 before taking a binomial power (got {0})")]
    NormalizeFirst(String),
    #[error("series is not in F-form: {0}")]
    InvalidForm(String),
    #[error("point {0} lies on the branch cut")]
    Domain(String),
    #[error("|z| = {modulus} is inside the divergence guard radius {radius}")]
    Divergence { modulus: f64, radius: f64 },
    #[error("invalid tail model: {0}")]
    InvalidModel(String),
    #[error("x = {x} lies inside the validity radius {radius}")]
    OutsideValidityRegion { x: f64, radius: f64 },
    #[error("unsupported semigroup: {0}")]
    UnsupportedSpec(String),
    #[error("nonzero tail coefficient at integer exponent {0} produces a logarithmic term")]
    LogTermObstruction(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("resonance: |sin| = {value:e} at {context}")]
    Resonance { context: String, value: f64 },
    #[error("inconclusive: precision exhausted ({0})")]
    InconclusivePrecision(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
