use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains no data")]
    EmptyInput,
    #[error("line {line}: expected {expected} values, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{token}` as a number")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: non-finite value")]
    NonFiniteValue { line: usize },
    #[error("unsupported ply content: {0}")]
    UnsupportedPlyElement(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("rejection sampling would stall: acceptance fraction {acceptance:.4} < 0.01")]
    RejectionStall { acceptance: f64 },
    #[error("need at least 2 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("every pairwise radius is zero")]
    AllPairsDegenerate,
    #[error("radius sample of size {m} is too small (need at least 20)")]
    SampleTooSmall { m: usize },
    #[error("k = {k} out of range for sample size {m}")]
    KOutOfRange { k: usize, m: usize },
    #[error("degenerate tail: {0}")]
    DegenerateTail(&'static str),
    #[error("degenerate spacing: {0}")]
    DegenerateSpacing(&'static str),
    #[error("order statistic {index} is not positive")]
    NonPositiveValue { index: usize },
    #[error("series of length {len} too short for dim {dim} and delay {delay}")]
    SeriesTooShort {
        len: usize,
        dim: usize,
        delay: usize,
    },
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::InvalidNumber { .. } => "MalformedRow",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::UnsupportedPlyElement(_) => "UnsupportedPlyElement",
            Error::InvalidParam(_) => "InvalidParam",
            Error::RejectionStall { .. } => "RejectionStall",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::AllPairsDegenerate => "AllPairsDegenerate",
            Error::SampleTooSmall { .. } => "SampleTooSmall",
            Error::KOutOfRange { .. } => "KOutOfRange",
            Error::DegenerateTail(_) => "DegenerateTail",
            Error::DegenerateSpacing(_) => "DegenerateSpacing",
            Error::NonPositiveValue { .. } => "NonPositiveValue",
            Error::SeriesTooShort { .. } => "SeriesTooShort",
        }
    }

    /// True for per-estimator degeneracies that are flagged rather than fatal.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTail(_) | Error::DegenerateSpacing(_) | Error::NonPositiveValue { .. }
        )
    }
}
