use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Where in a text input a problem was found. Lines and columns are 1-based;
/// column 0 means the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{at}: malformed header: {reason}")]
    MalformedHeader { at: Location, reason: String },
    #[error("{at}: non-numeric token {token:?}")]
    NonNumeric { at: Location, token: String },
    #[error("{at}: expected {expected} cells, found {found}")]
    WrongCellCount {
        at: Location,
        expected: usize,
        found: usize,
    },
    #[error("every cell is NODATA")]
    AllNodata,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid elevation model: {0}")]
    InvalidDem(String),
    #[error("quantization step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("scale factor must be at least 1, got {0}")]
    InvalidScale(u64),
    #[error("elevation overflow while scaling {value} by {factor}")]
    ElevationOverflow { value: u32, factor: u64 },
    #[error("row {row} is not a single interval (it has {segments} segments)")]
    NonIntervalRow { row: usize, segments: usize },
    #[error("the model has zero volume")]
    ZeroVolume,
    #[error("unknown structuring element {0:?}")]
    UnknownElement(String),
    #[error("invalid structuring element: {0}")]
    InvalidElement(String),
    #[error("run table direction {table} does not match the family direction {family}")]
    DirectionMismatch { table: String, family: String },
    #[error("not a uni-peak model: {0}")]
    NotUnipeak(String),
    #[error("enumeration cap exceeded: {needed} members, cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("record {0:?} has no label")]
    Unlabeled(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("expected {expected} features, got {found}")]
    FeatureCount { expected: usize, found: usize },
    #[error("malformed decision tree: {0}")]
    MalformedTree(String),
}
