//! Parsing, type checking and loop normalisation of `.rsl` programs.
//!
//! [`compile`] runs the whole pipeline: [`parse`], [`typecheck`] and
//! [`expand_bounded_loops`]. The resulting program only contains the
//! unbounded main loops; every bounded `for` has been unrolled.

pub mod ast;
mod loops;
mod parser;
mod pretty;
mod typecheck;
mod typed;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use ast::Span;
pub use loops::{expand_bounded_loops, index_loops, loop_table_text};
pub use parser::{parse, parse_scalar_type};
pub use pretty::pretty_print;
pub use typecheck::typecheck;
pub use typed::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    TypeMismatch,
    Undeclared,
    Duplicate,
    InputAssignment,
    Uninitialized,
    NonStaticBound,
    UnknownLoop,
}

impl ErrorKind {
    fn label(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::TypeMismatch => "type error",
            ErrorKind::Undeclared => "undeclared identifier",
            ErrorKind::Duplicate => "duplicate declaration",
            ErrorKind::InputAssignment => "invalid assignment",
            ErrorKind::Uninitialized => "uninitialized variable",
            ErrorKind::NonStaticBound => "invalid loop bound",
            ErrorKind::UnknownLoop => "unknown loop",
        }
    }
}

/// A frontend diagnostic with its source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontendError {
    pub kind: ErrorKind,
    pub span: Span,
    pub message: String,
    /// Expected tokens, for syntax errors.
    pub expected: Vec<String>,
}

impl FrontendError {
    pub fn new(kind: ErrorKind, span: Span, message: impl Into<String>) -> FrontendError {
        FrontendError {
            kind,
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub(crate) fn with_expected(mut self, expected: &[&str]) -> FrontendError {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line,
            self.span.col,
            self.kind.label(),
            self.message
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FrontendError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Insert an `assert(false)` after the last copy of every bounded loop,
    /// reachable only if the loop would run longer than its bound.
    pub unwinding_assertions: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            unwinding_assertions: true,
        }
    }
}

/// Parse, type-check and unroll bounded loops.
pub fn compile(src: &str, opts: CompileOptions) -> Result<TypedProgram, FrontendError> {
    let ast = parse(src)?;
    let typed = typecheck(&ast)?;
    expand_bounded_loops(&typed, opts.unwinding_assertions)
}
