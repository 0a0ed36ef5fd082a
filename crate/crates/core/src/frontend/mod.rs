//! Lexing and parsing of MiniJML sources (`.mjml`).

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::parse_program;

use crate::diag::Diagnostic;
use crate::source::SourceUnit;

/// Tokenize and parse a unit, folding lexical errors into diagnostics.
pub fn parse_unit(unit: &SourceUnit) -> Result<ast::Program, Vec<Diagnostic>> {
    let tokens = tokenize(unit).map_err(|e| vec![Diagnostic::from(e)])?;
    parse_program(&tokens)
}
