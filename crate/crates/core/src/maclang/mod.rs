//! The macro-preprocessor language: `%macro`/`%mend` definitions, `%let`,
//! `%put` (including `_user_`), `%eval`, and `&name` references resolved by
//! textual substitution against a stack of symbol tables.
//!
//! Nothing is cached: every `&name` is looked up and rescanned at the moment
//! it is reached, so a reference re-reads whatever its dependencies hold at
//! that time.

mod arith;
mod parse;
mod scan;
mod session;
mod table;

use alloc::string::String;
use core::fmt;

pub use arith::{eval_arith, ArithError};
pub use parse::{define_macro, parse_statements, MacStmt, MacroDef, MacroParam, PutArg};
pub use scan::{scan, strip_comments, MacroToken, MacroTokenKind};
pub use session::{run_session, SessionError, LineKind, LogLine, MacroOutput, Session, MAX_NESTING, MAX_RESCAN_DEPTH};
pub use table::{SymbolTable, TableLabel, TableStatus};

use crate::pos::Pos;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MacroErrorKind {
    #[error("unterminated comment")]
    UnterminatedComment,
    #[error("`{0}` must be followed by a name")]
    StrayChar(char),
    #[error("expected {expected}, found {found}")]
    Parse { expected: &'static str, found: String },
    #[error("duplicate parameter `{0}`")]
    DuplicateParam(String),
    #[error("macro `{0}` has no %mend")]
    UnterminatedMacro(String),
    #[error("macro `{0}` is not defined")]
    UnknownMacro(String),
    #[error("macro `{macro_name}` has no parameter `{param}`")]
    UnknownParam { macro_name: String, param: String },
    #[error("macro `{macro_name}` takes {max} positional argument(s), got {given}")]
    TooManyArgs { macro_name: String, given: usize, max: usize },
    #[error("apparent symbolic reference `{0}` not resolved")]
    UnresolvedRef(String),
    #[error("resolving `&{0}` exceeded {MAX_RESCAN_DEPTH} nested substitutions")]
    DepthExceeded(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("macro invocations nested deeper than {MAX_NESTING}")]
    NestingTooDeep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroError {
    pub kind: MacroErrorKind,
    pub pos: Option<Pos>,
}

impl MacroError {
    pub fn at(kind: MacroErrorKind, pos: Pos) -> Self {
        MacroError { kind, pos: Some(pos) }
    }

    fn or_at(mut self, pos: Pos) -> Self {
        self.pos.get_or_insert(pos);
        self
    }
}

impl From<MacroErrorKind> for MacroError {
    fn from(kind: MacroErrorKind) -> Self {
        MacroError { kind, pos: None }
    }
}

impl From<ArithError> for MacroError {
    fn from(e: ArithError) -> Self {
        MacroErrorKind::Arith(e).into()
    }
}

impl fmt::Display for MacroError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl core::error::Error for MacroError {}
