use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variant names are part of the external contract: the service and the CLI
/// surface them verbatim through [`Error::name`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lower}, {upper}]: bounds must be finite with lower <= upper")]
    InvalidInterval { lower: f64, upper: f64 },
    #[error("neutral half-width must be finite and non-negative, got {0}")]
    InvalidNeutral(f64),
    #[error("matrix must be square and non-empty: {0}")]
    NotSquare(String),
    #[error("matrix is not reciprocal: entry ({i}, {j}) is not the opposite of ({j}, {i})")]
    NotReciprocal { i: usize, j: usize },
    #[error("input is not consistent: {0}")]
    InconsistentInput(String),
    #[error("interval lengths differ: expected {expected}, found {found} at position {index}")]
    LengthMismatch {
        index: usize,
        expected: f64,
        found: f64,
    },
    #[error("objects are not ordered best to worst: step {0} is not above the neutral element")]
    NotOrdered(usize),
    #[error("normalization constant must be positive, got {0}")]
    DegenerateScale(f64),
    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("value {value} is outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },
    #[error("reference index {index} out of range for {n} objects")]
    BadReference { index: usize, n: usize },
    #[error("empty chain")]
    EmptyChain,

    #[error("at least two objects are required, got {0}")]
    TooFewObjects(usize),
    #[error("duplicate object name {0:?}")]
    DuplicateNames(String),
    #[error("blank-card counts must be non-negative")]
    NegativeCards,
    #[error("blank-card counts must be integers")]
    NonIntegerCards,
    #[error("slot {slot} does not exist (session has {slots} slots)")]
    BadSlot { slot: usize, slots: usize },
    #[error("blank cards are missing for slot {0}")]
    IncompleteCards(usize),
    #[error("no repair proposal is pending")]
    NoPendingProposal,
    #[error("no accepted chain; diagnose and accept first")]
    NotAccepted,
    #[error("operation not allowed in phase {0}")]
    InvalidPhase(&'static str),

    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("schema violation at {path}: {detail}")]
    SchemaViolation { path: String, detail: String },
    #[error("invariant violation at {path}: {detail}")]
    InvariantViolation { path: String, detail: String },
}

impl Error {
    /// Stable identifier used in error bodies and CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInterval { .. } => "InvalidInterval",
            Error::InvalidNeutral(_) => "InvalidNeutral",
            Error::NotSquare(_) => "NotSquare",
            Error::NotReciprocal { .. } => "NotReciprocal",
            Error::InconsistentInput(_) => "InconsistentInput",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NotOrdered(_) => "NotOrdered",
            Error::DegenerateScale(_) => "DegenerateScale",
            Error::NegativeAlpha(_) => "NegativeAlpha",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::BadReference { .. } => "BadReference",
            Error::EmptyChain => "EmptyChain",
            Error::TooFewObjects(_) => "TooFewObjects",
            Error::DuplicateNames(_) => "DuplicateNames",
            Error::NegativeCards => "NegativeCards",
            Error::NonIntegerCards => "NonIntegerCards",
            Error::BadSlot { .. } => "BadSlot",
            Error::IncompleteCards(_) => "IncompleteCards",
            Error::NoPendingProposal => "NoPendingProposal",
            Error::NotAccepted => "NotAccepted",
            Error::InvalidPhase(_) => "InvalidPhase",
            Error::Malformed(_) => "Malformed",
            Error::SchemaViolation { .. } => "SchemaViolation",
            Error::InvariantViolation { .. } => "InvariantViolation",
        }
    }

    /// Document path of the offending field, for format errors.
    pub fn path(&self) -> Option<&str> {
        match self {
            Error::SchemaViolation { path, .. } | Error::InvariantViolation { path, .. } => {
                Some(path)
            }
            _ => None,
        }
    }
}
