use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample table has no rows")]
    EmptyTable,

    #[error("target column `{0}` not found")]
    MissingTargetColumn(String),

    #[error("table needs at least one source column and one target column, got {0} column(s)")]
    TooFewColumns(usize),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("variable set is empty")]
    EmptyVariableSet,

    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },

    #[error("source subsets overlap at index {0}")]
    OverlappingSubsets(usize),

    #[error("symbol {symbol} out of range for variable {var} with alphabet size {size}")]
    SymbolOutOfRange { var: usize, symbol: u32, size: usize },

    #[error("invalid probability weight {0}")]
    InvalidWeight(f64),

    #[error("distribution has no mass")]
    EmptyDistribution,

    #[error("information value {0} is negative beyond tolerance")]
    NegativeInformation(f64),

    #[error("I(X;Y) = {mi} bits is not above the threshold {threshold}; ratio is undefined")]
    IllDefinedInvariant { mi: f64, threshold: f64 },

    #[error("input out of range: {0}")]
    OutOfRangeInput(String),

    #[error("unsupported number of sources {n} (supported: 1..={max})")]
    UnsupportedSize { n: usize, max: usize },

    #[error("antichains are over different source counts ({0} vs {1})")]
    MismatchedSourceCount(usize, usize),

    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),

    #[error("target symbol {0} has zero probability")]
    ZeroProbabilityTarget(u32),

    #[error("degree {k} out of range for {n} sources")]
    OutOfRangeK { k: usize, n: usize },

    #[error("invalid quantizer configuration: {0}")]
    InvalidConfig(String),

    #[error("uniform draw {0} outside [0, 1]")]
    InvalidDraw(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
