use thiserror::Error;

use crate::field::ScalarField;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch {
        left: ScalarField,
        right: ScalarField,
    },

    #[error("operation requires a {expected} field, got {actual}")]
    UnsupportedField {
        expected: &'static str,
        actual: ScalarField,
    },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state vector is zero")]
    ZeroVector,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("missing pointer state for basis label `{0}`")]
    MissingPointer(String),

    #[error("pointer states for `{0}` and `{1}` are not orthogonal")]
    NonOrthogonalPointers(String, String),

    #[error("invalid fraction table: {0}")]
    InvalidFractionTable(String),

    #[error("{name} = {value} is out of range ({range})")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("branch tree would have {0} nodes, more than the limit of {1}")]
    TreeTooLarge(u128, usize),

    #[error("observation is impossible under every hypothesis")]
    NoConsistentWorlds,

    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),

    #[error("invalid hypothesis set: {0}")]
    InvalidHypotheses(String),
}

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl ToString,
        range: &'static str,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            range,
        }
    }
}
