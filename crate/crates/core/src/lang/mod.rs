//! Front-end for the property language: LTL with SEREs, bounded quantifiers
//! over classes and linear arithmetic atoms with `next` / `der` terms.
//!
//! The concrete syntax (see `docs/grammar.md`) reads close to English:
//! `always (forall t in Train . der(t.pos) <= t.limit)` is one constraint.

mod ast;
mod desugar;
mod lexer;
mod parser;
mod pretty;
mod typecheck;

use std::fmt;

pub use ast::{CmpOp, Constraint, Formula, Quantifier, Sere, Term};
pub use desugar::{desugar, is_core};
pub use parser::{parse_constraint, parse_typed};
pub use pretty::{pretty, pretty_term};
pub use typecheck::{term_type, typecheck, Ty};

/// Byte range in the constraint source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LangErrorKind {
    Lexical(String),
    Syntax(String),
    UnknownClass(String),
    UnknownAttribute(String),
    UnboundVariable(String),
    Type(String),
}

impl fmt::Display for LangErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangErrorKind::Lexical(m) => write!(f, "lexical error: {m}"),
            LangErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            LangErrorKind::UnknownClass(c) => write!(f, "unknown class {c}"),
            LangErrorKind::UnknownAttribute(a) => write!(f, "unknown attribute {a}"),
            LangErrorKind::UnboundVariable(v) => write!(f, "unbound variable {v}"),
            LangErrorKind::Type(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} (at {span})")]
pub struct LangError {
    pub kind: LangErrorKind,
    /// Zero-length span when the error was found on a span-free AST.
    pub span: Span,
}

impl LangError {
    pub fn message(&self) -> String {
        self.kind.to_string()
    }
}
