use alloc::string::String;

/// Errors raised by the pressure laboratory.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("alphabet must have at least one symbol")]
    EmptyAlphabet,
    #[error("transition matrix must be {expected}x{expected}")]
    BadMatrixShape { expected: usize },
    #[error("symbol {0} has no successor")]
    NoSuccessor(usize),
    #[error("symbol {0} has no predecessor")]
    NoPredecessor(usize),
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("word is not admissible: {0}")]
    Inadmissible(String),
    #[error("cycle of a point must be nonempty")]
    EmptyCycle,
    #[error("number of steps must be at least 1")]
    ZeroSteps,
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("invalid energy: {0}")]
    InvalidEnergy(String),
    #[error("invalid block code: {0}")]
    InvalidCode(String),
    #[error(
        "working resolution {resolution} exceeds the cap {cap}; instance too large for exact mode"
    )]
    ResolutionCap { resolution: usize, cap: usize },
    #[error("separation radius 2^-{m} exceeds the Lebesgue number 2^-{lebesgue_exp} of the cover")]
    AboveLebesgue { m: u32, lebesgue_exp: u32 },
    #[error("branch-and-bound node budget of {0} exhausted")]
    SearchBudget(u64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
