//! Lexer, parser and canonical printer for funclang, the small functional
//! language the promise engine runs.

mod ast;
mod lexer;
mod parser;
mod printer;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ast::{Arg, BinOp, Expr, FunctionDef, Param, Program, Stmt, StmtKind};
pub use lexer::{tokenize, SrcToken, TokenKind};
pub use parser::parse_program;
pub use printer::print_program;

use crate::pos::Pos;

/// Expected-token set of a parse error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected(pub Vec<&'static str>);

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(if i + 1 == self.0.len() { " or " } else { ", " })?;
            }
            f.write_str(e)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{pos}: unexpected character {ch:?}")]
    Lex { pos: Pos, ch: char },
    #[error("{pos}: expected {}, found {found}", Expected(.expected.clone()))]
    Parse {
        pos: Pos,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("{pos}: duplicate parameter `{name}`")]
    DuplicateParam { pos: Pos, name: String },
    #[error("{pos}: duplicate named argument `{name}`")]
    DuplicateArg { pos: Pos, name: String },
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex { pos, .. }
            | SyntaxError::Parse { pos, .. }
            | SyntaxError::DuplicateParam { pos, .. }
            | SyntaxError::DuplicateArg { pos, .. } => *pos,
        }
    }
}

/// Tokenizes and parses funclang source.
pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    parse_program(&tokenize(source)?)
}
