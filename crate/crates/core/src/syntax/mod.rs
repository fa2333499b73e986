//! MiniLang front end: lexer, parser, AST, static checks and the canonical
//! pretty-printer.

mod ast;
mod check;
mod lexer;
mod parser;
mod pretty;
mod testcase;
pub mod visit;

use std::fmt;

pub use ast::*;
pub use check::{check_program, check_test, StaticType, TypeTable, BUILTINS, LIST_METHODS, TEST_BUILTINS};
pub use lexer::KEYWORDS;
pub use parser::{parse_expr, parse_module, parse_stmt};
pub use pretty::{expr_text, pretty_print, quote, signature, Pretty, Printer};
pub use testcase::{tests_in, Modification, ModificationKind, Origin, TestMethod};

/// First syntax error in a source file.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: SourcePos,
    pub message: String,
}

/// A static (name or type) error.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct CheckError {
    pub pos: SourcePos,
    pub message: String,
}

impl CheckError {
    pub fn new(pos: &SourcePos, message: impl Into<String>) -> Self {
        Self { pos: pos.clone(), message: message.into() }
    }
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}
