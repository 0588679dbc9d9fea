//! Relation encodings: the flat identifier-prefixed encoding for rank-3
//! values and the normalized multi-table encoding for rank-4 values.

mod flat;
mod normalized;

pub use flat::{decode_flat, encode_flat, FlatEncoding};
pub use normalized::{decode_normalized, encode_normalized, NormalizedEncoding};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("cardinality {found} exceeds bound n^d = {bound}")]
    CardinalityExceeded { found: usize, bound: usize },
    #[error("identifier space exhausted: {count} distinct {what} but only {available} identifiers")]
    IdentifierSpace {
        what: &'static str,
        count: usize,
        available: usize,
    },
    #[error("member has width {found}, expected {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("component {index} has arity {found}, expected {expected}")]
    ComponentArity {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("bound n^d overflows")]
    BoundOverflow,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("identifier {id:?} appears under more than one pattern")]
    IdentifierInTwoPatterns { id: Vec<usize> },
    #[error("identifier {id:?}: rows are not a full cross product of component tuples")]
    NonProductRows { id: Vec<usize> },
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("unreferenced row: {0}")]
    Unreferenced(String),
    #[error("duplicate key {id:?} in {table}")]
    DuplicateKey { table: String, id: Vec<usize> },
    #[error("table {table} has arity {found}, expected {expected}")]
    TableArity {
        table: String,
        expected: usize,
        found: usize,
    },
}
