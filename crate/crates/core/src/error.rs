use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid grade {grade}: space has grades 0..={max}")]
    InvalidGrade { grade: usize, max: usize },
    #[error("grading violated at grade {grade}, index {index}: weight decreased")]
    GradingViolation { grade: usize, index: usize },
    #[error("weight at grade {grade}, index {index} is below the positivity floor")]
    NonPositiveWeight { grade: usize, index: usize },
    #[error("zero sample at position {0}")]
    ZeroSample(usize),
    #[error("frame deficient: sigma_min/sigma_max = {ratio:e} below rank threshold")]
    FrameDeficient { ratio: f64 },
    #[error("rank deficient synthesis matrix")]
    RankDeficient,
    #[error("expansion residual {residual:e} exceeds tolerance")]
    ExpansionFailure { residual: f64 },
    #[error("operator is not a left inverse: residual {residual:e}")]
    NotLeftInverse { residual: f64 },
    #[error("L = S_new*G is singular although the hypothesis holds")]
    SingularL,
    #[error("S*V is singular although the hypothesis holds")]
    SingularSV,
    #[error("invalid weight envelope: entries must satisfy 0 < inf <= sup < inf")]
    InvalidEnvelope,
    #[error("denominator vanishes on the grid sphere")]
    ZeroDenominator,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("config parse error: {0}")]
    ParseError(String),
    #[error("config validation error: {0}")]
    ValidationError(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
