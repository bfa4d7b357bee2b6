//! Textual surface language for charts.
//!
//! ```text
//! protocol investigation {
//!   actors Prosecutor, Suspect, DFExpert: "DF Expert";
//!   objective evidence_set_obtained: eventually(10);
//!   custody 5 .. 10;
//!   loop (1..*) {
//!     msg 1 Prosecutor -> Suspect: "interrogation question";
//!     msg 2 Suspect -> Prosecutor: "answer";
//!   }
//!   msg 3 Prosecutor -> DFExpert: "additional case information" [phase=Identification];
//! }
//! ```
//!
//! `#` comments run to end of line; strings are double-quoted with `\"`
//! and `\\` escapes; files are UTF-8 with line endings normalized to LF.
//! [`serialize`] emits the canonical form (one item per line, two-space
//! indent per fragment depth, attrs sorted) and [`parse`] of that form
//! reproduces the document exactly.

mod lexer;
mod parser;
mod render;
mod serialize;

use std::fmt;

use thiserror::Error;

pub use render::{render, RenderFormat};
pub use serialize::serialize;

/// Location of a token in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    /// 1-based line.
    pub line: usize,
    /// 1-based column, in characters.
    pub column: usize,
    /// Length in characters, at least 1.
    pub length: usize,
}

/// A syntax or document error, localized to the offending token.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    /// Token classes that would have been accepted; empty for errors
    /// promoted from document validation.
    pub expected: Vec<String>,
    /// The offending lexeme.
    pub found: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(
        span: SourceSpan,
        expected: Vec<String>,
        found: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        ParseError {
            span,
            expected,
            found: found.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.span.line, self.span.column, self.message
        )?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

pub use parser::parse;
