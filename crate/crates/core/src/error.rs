use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports. Numeric payloads are widened to `f64`
/// so the error type stays independent of the solver scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed file at line {line}, token {token}: {reason}")]
    MalformedFile { line: usize, token: usize, reason: String },
    #[error("inconsistent asset count: {0}")]
    InconsistentCount(String),
    #[error("correlation {value} for assets ({i}, {j}) is outside [-1, 1] (line {line})")]
    CorrelationOutOfRange {
        i: usize,
        j: usize,
        value: f64,
        line: usize,
    },
    #[error("diagonal correlation of asset {i} is {value}, expected 1 (line {line})")]
    DiagonalNotUnit { i: usize, value: f64, line: usize },
    #[error("no correlation entry for assets ({i}, {j})")]
    MissingCorrelation { i: usize, j: usize },
    #[error("conflicting correlation entries for assets ({i}, {j}) at line {line}")]
    ConflictingCorrelation { i: usize, j: usize, line: usize },
    #[error("index {index} out of range for {len} assets")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid instance data: {0}")]
    InvalidInstance(String),

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("infeasible bounds: k = {k}, epsilon = {epsilon}, delta = {delta} admit no portfolio")]
    InfeasibleBounds { k: usize, epsilon: f64, delta: f64 },
    #[error("weight at position {position} is {value}; rescale needs positive weights")]
    NonPositiveWeight { position: usize, value: f64 },
    #[error("asset {0} appears more than once in the portfolio")]
    DuplicateAsset(usize),
    #[error("portfolio has {assets} assets but {weights} weights")]
    LengthMismatch { assets: usize, weights: usize },

    #[error("asset {0} is not in the portfolio")]
    AssetNotInPortfolio(usize),
    #[error("asset {0} is already in the portfolio")]
    AssetAlreadyInPortfolio(usize),
    #[error("every asset is already held; no replacement available")]
    NoReplacementAvailable,
    #[error("neighborhood is empty")]
    EmptyNeighborhood,

    #[error("target return {target} is outside the attainable range [{min}, {max}]")]
    Infeasible { target: f64, min: f64, max: f64 },
    #[error("QP solver stopped after {iterations} iterations with residual {residual}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("frontier is empty")]
    EmptyFrontier,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("bad CSV row at line {line}, column `{column}`: {reason}")]
    CsvRow {
        line: usize,
        column: String,
        reason: String,
    },
}
