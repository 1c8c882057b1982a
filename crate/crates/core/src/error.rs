use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("metric is degenerate or not positive definite at {point:?}")]
    DegenerateMetric { point: Vec<f64> },
    #[error("singular matrix")]
    Singular,
    #[error("derivative of order {needed} requested but only {available} available")]
    DerivativeOrder { needed: usize, available: usize },
    #[error("degenerate vector pair: {0}")]
    DegeneratePair(String),
    #[error("degenerate seed vectors for frame construction")]
    DegenerateSeeds,
    #[error("endomorphism is not an almost complex structure (|J^2 + Id| = {residual:e})")]
    NotAlmostComplex { residual: f64 },
    #[error("form degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("base metric is not Einstein (|Ric - (s/n) g| = {residual:e})")]
    NonEinstein { residual: f64 },
    #[error("invariant `{identity}` violated: residual {residual:e}")]
    InvariantViolation { identity: String, residual: f64 },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("chart touches a coordinate singularity: {0}")]
    ChartSingularity(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("nothing to report")]
    EmptyReport,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
