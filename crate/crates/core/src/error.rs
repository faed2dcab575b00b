use alloc::string::String;

use crate::dataset::TaskKind;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("length mismatch for {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("sensitive group `{0}` has no members")]
    EmptyGroup(bool),

    #[error("invalid range: a = {a} is greater than b = {b}")]
    InvalidRange { a: f64, b: f64 },

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} contains a non-finite value at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("{what} value {value} at index {index} lies outside [0, 1]")]
    OutOfUnitRange {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    InvalidCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {fields} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        fields: usize,
        expected: usize,
    },

    #[error("only {0} rows remain after cleaning, need at least 2")]
    TooFewRows(usize),

    #[error("target column `{0}` is constant and cannot be normalized")]
    ConstantTarget(String),

    #[error("comparison sample of {requested} rows exceeds the {available} test rows")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("expected {expected} feature columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("learner requires a {expected} task, dataset is {got}")]
    TaskMismatch { expected: TaskKind, got: TaskKind },

    #[error("normal equations are singular")]
    Singular,

    #[error("training loss became non-finite at iteration {0}")]
    NonFiniteLoss(usize),

    #[error("report invariant violated: {0}")]
    Invariant(&'static str),
}

impl Error {
    /// Errors caused by caller-supplied parameters rather than by data.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidRange { .. }
                | Error::InvalidParameter { .. }
                | Error::SampleTooLarge { .. }
                | Error::TaskMismatch { .. }
        )
    }
}
