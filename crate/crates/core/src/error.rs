use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which diagonal block of a two-part split failed to invert.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitSide {
    /// The block on the lower interval of the split.
    Lower,
    /// The block on the upper interval of the split.
    Upper,
}

impl fmt::Display for SplitSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitSide::Lower => f.write_str("X (lower)"),
            SplitSide::Upper => f.write_str("Z (upper)"),
        }
    }
}

/// One nonzero block of a residual matrix, formatted field-agnostically.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ResidualBlock {
    pub row: usize,
    pub col: usize,
    pub source_degree: i32,
    pub data: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("order relation contains a cycle through element {0}")]
    CycleDetected(usize),

    #[error("element {element} out of range for a poset on {n} elements")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("element {element} has nonzero chains in several degrees {degrees:?}")]
    DegreeNotConcentrated { element: usize, degrees: Vec<i32> },

    #[error("map does not square to zero (degree {degree})")]
    NotABoundary { degree: i32 },

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("long exact sequence is not exact: {0}")]
    ExactnessFailure(String),

    #[error("braid morphism has no component on interval {0}")]
    MissingInterval(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("search budget of {budget} candidates exceeded")]
    SearchBudgetExceeded { budget: u64 },

    #[error("exhaustive search needs a finite field; supply an explicit witness instead")]
    InfiniteField,

    #[error("construction requires both connection matrices to be zero")]
    NonTrivialConnection,

    #[error("uniqueness violated: {0}")]
    UniquenessViolated(String),

    #[error("property ({clause}) fails: {detail}")]
    PropertyFailure { clause: String, detail: String },

    #[error("{0} is not a verified braid isomorphism")]
    UnverifiedMorphism(String),

    #[error("corner block is incompatible: square of the assembled matrix has {} nonzero blocks", residual.len())]
    IncompatibleBlock { residual: Vec<ResidualBlock> },

    #[error("not a valid connection matrix: {0}")]
    NotValid(String),

    #[error("diagonal block {side} is singular in degree {degree} for split {split}")]
    SingularDiagonalBlock {
        side: SplitSide,
        degree: i32,
        split: String,
    },

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag used in CLI reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CycleDetected(_) => "CycleDetected",
            Error::ElementOutOfRange { .. } => "ElementOutOfRange",
            Error::DegreeNotConcentrated { .. } => "DegreeNotConcentrated",
            Error::NotABoundary { .. } => "NotABoundary",
            Error::NotChainMap(_) => "NotChainMap",
            Error::ExactnessFailure(_) => "ExactnessFailure",
            Error::MissingInterval(_) => "MissingInterval",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::SearchBudgetExceeded { .. } => "SearchBudgetExceeded",
            Error::InfiniteField => "InfiniteField",
            Error::NonTrivialConnection => "NonTrivialConnection",
            Error::UniquenessViolated(_) => "UniquenessViolated",
            Error::PropertyFailure { .. } => "PropertyFailure",
            Error::UnverifiedMorphism(_) => "UnverifiedMorphism",
            Error::IncompatibleBlock { .. } => "IncompatibleBlock",
            Error::NotValid(_) => "NotValid",
            Error::SingularDiagonalBlock { .. } => "SingularDiagonalBlock",
            Error::Schema { .. } => "SchemaError",
            Error::InvalidField(_) => "InvalidField",
            Error::Precondition(_) => "Precondition",
            Error::Io(_) => "Io",
        }
    }
}
