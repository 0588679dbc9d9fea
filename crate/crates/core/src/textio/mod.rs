//! Textual formats for formulae (S-expressions) and structures (line-based).
//!
//! This is the only I/O boundary of the crate. Parsing is total: every input
//! yields a value or an error carrying a byte span.

mod lexer;
mod parse_formula;
mod parse_structure;
mod print;

pub use parse_formula::parse_formula;
pub use parse_structure::parse_structure;
pub use print::{print_formula, print_structure};

use thiserror::Error;

/// Byte offsets into the input text, `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub fn new(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseError {
            message: message.into(),
            span,
        }
    }
}
