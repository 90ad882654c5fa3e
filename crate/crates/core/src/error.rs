use thiserror::Error;

/// Errors raised by the decomposition library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability mass sums to {total}, expected 1 (tolerance {tolerance:e})")]
    Normalization { total: f64, tolerance: f64 },

    #[error("negative or non-finite probability {value} at outcome {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("symbol 0 is reserved for source failure but appears in {alphabet}")]
    ReservedSymbol { alphabet: String },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("duplicate outcome x={x:?}, t={t}")]
    DuplicateOutcome { x: Vec<u32>, t: u32 },

    #[error("source index {index} out of range for n={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("index sets overlap on {0:?}")]
    OverlappingIndexSets(Vec<usize>),

    #[error("target symbol {0} has zero probability")]
    ZeroProbabilityTarget(u32),

    #[error("n={n} exceeds the lattice cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("antichains have different arity ({0} vs {1})")]
    MixedArity(usize, usize),

    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),

    #[error("value map does not cover the lattice for n={n}: {reason}")]
    IncompleteValueMap { n: usize, reason: String },

    #[error("{what}={value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: String,
    },

    #[error("strategy does not match the system support: {0}")]
    StrategySupportMismatch(String),

    #[error("strategy row for x={x:?}, t={t} does not sum to 1 (sum {sum})")]
    StrategyNotStochastic { x: Vec<u32>, t: u32, sum: f64 },

    #[error("strategy places mass on a pattern outside the feasible set")]
    InfeasibleStrategy,

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("solver did not converge: duality gap {gap:e} above tolerance {tolerance:e} after {iterations} iterations")]
    ConvergenceFailure {
        gap: f64,
        tolerance: f64,
        iterations: usize,
    },

    #[error("grid oracle too large: {0}")]
    OracleTooLarge(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("operation requires n={expected}, system has n={found}")]
    ArityError { expected: usize, found: usize },

    #[error("redundancy {r} outside feasible range [0, {max}]")]
    RedundancyOutOfRange { r: f64, max: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
