//! Text format for CAOs (`.sns` files).
//!
//! ```text
//! cao dec {
//!   entities: c0, c1, c2;
//!   op a: L (c0/10) -> (c1*1);
//!   op b: L (c1/10) -> (c2*1);
//!   init: c0=234;
//! }
//! ```
//!
//! Operands are written `entity/radix`, images `entity*rate`. An optional
//! `kind` clause before the closing `;` selects `#` (the default), `delta`,
//! `fact` or `fn NAME`. `#` starts a line comment everywhere else.

mod lexer;
mod parser;
mod serialize;

use std::fmt;

pub use parser::{parse, parse_with};
pub use serialize::serialize;

/// Location of a diagnostic: 1-based line and column (in characters) plus
/// the byte range it covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<String>,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            span,
            message: message.into(),
            expected: None,
        }
    }

    pub(crate) fn expecting(mut self, what: impl Into<String>) -> Self {
        self.expected = Some(what.into());
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.line, self.span.column, self.message
        )?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
