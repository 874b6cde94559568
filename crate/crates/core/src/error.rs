//! Error types shared across the crate.

use thiserror::Error;

/// Errors from building or manipulating set partitions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("point {0} appears in more than one block")]
    DuplicatePoint(usize),
    #[error("point {0} is not covered by any block")]
    MissingPoint(usize),
    #[error("point {point} is out of range 1..={max}")]
    OutOfRange { point: usize, max: usize },
    #[error("blocks must be non-empty")]
    EmptyBlock,
    #[error("signature mismatch: expected {expected} glue points, found {found}")]
    SignatureMismatch { expected: usize, found: usize },
    #[error("color word lengths ({upper},{lower}) do not match signature ({k},{l})")]
    ColorLength {
        upper: usize,
        lower: usize,
        k: usize,
        l: usize,
    },
    #[error("cannot rotate: the {0} row is empty")]
    EmptyRow(&'static str),
    #[error("partition is not a pairing (block of size != 2)")]
    NotAPairing,
    #[error("operation requires a noncrossing partition")]
    Crossing,
    #[error("partition carries no colors")]
    MissingColors,
    #[error("pairing is not the outline of any partition (pair joins two {0} ports)")]
    NotAnOutline(&'static str),
    #[error("row has odd length {0}; doubled points come in pairs")]
    OddDoubledRow(usize),
}

/// Text-format parse failure with the byte offset of the offending input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

/// Errors from scalar arithmetic on formal half powers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("cannot add scalars with half exponents {0} and {1}")]
    ExponentMismatch(i64, i64),
    #[error("evaluation dimension must be >= 1, got {0}")]
    BadDimension(i64),
}

/// Errors from sparse operator algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("leg dimension must be >= 1")]
    BadDimension,
    #[error("index {index} out of range for {legs} legs of dimension {dim}")]
    IndexOutOfRange { index: u64, legs: usize, dim: usize },
    #[error("cannot compose: left input has {left_in} legs, right output has {right_out}")]
    ComposeMismatch { left_in: usize, right_out: usize },
    #[error("operators have different signatures")]
    ShapeMismatch,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square")]
    NotSquare,
}

/// Errors from the closure engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("duality morphism must have signature (0,2), got ({0},{1})")]
    BadDuality(usize, usize),
    #[error("duality morphism fails the conjugate equations")]
    InvalidDuality,
    #[error("generator {index} has signature ({k},{l}); projective mode needs even legs")]
    OddGenerator { index: usize, k: usize, l: usize },
    #[error("generator {index} has leg dimension {found}, engine runs at {expected}")]
    GeneratorDimension {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("max_legs must be >= 2, got {0}")]
    BadLegBound(usize),
    #[error("half rotation needs a (0, 2m) operator with m >= 1, got ({0},{1})")]
    BadHalfRotation(usize, usize),
}
