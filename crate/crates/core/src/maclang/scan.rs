//! Word scanner for the macro language.
//!
//! Block comments are blanked out first (newlines kept, so positions stay
//! true). The scanner then produces fine-grained tokens, except after `%let
//! name=` and `%put`, where the rest of the statement up to `;` is a single
//! raw `Text` token: those statements store or print text, not expressions.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::{MacroError, MacroErrorKind};
use crate::pos::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacroTokenKind {
    PctMacro,
    PctMend,
    PctLet,
    PctPut,
    PctEval,
    /// `%name`: a macro invocation.
    PctCall(String),
    AmpRef(String),
    Ident,
    Int,
    Op(char),
    LParen,
    RParen,
    Equals,
    Semi,
    Comma,
    Text,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroToken {
    pub kind: MacroTokenKind,
    pub text: String,
    pub pos: Pos,
    /// Byte range in the comment-stripped source.
    pub span: Range<usize>,
}

/// Replaces `/* ... */` comments with spaces, keeping line breaks.
pub fn strip_comments(source: &str) -> Result<String, MacroError> {
    let mut out = String::with_capacity(source.len());
    let mut rest = source;
    let (mut line, mut col) = (1u32, 1u32);
    let advance = |s: &str, line: &mut u32, col: &mut u32| {
        for c in s.chars() {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
    };
    while let Some(start) = rest.find("/*") {
        let (before, after) = rest.split_at(start);
        out.push_str(before);
        advance(before, &mut line, &mut col);
        let Some(end) = after[2..].find("*/") else {
            return Err(MacroError::at(MacroErrorKind::UnterminatedComment, Pos::new(line, col)));
        };
        let comment = &after[..end + 4];
        for c in comment.chars() {
            if c == '\n' {
                out.push('\n');
            } else {
                out.push(' ');
            }
        }
        advance(comment, &mut line, &mut col);
        rest = &after[end + 4..];
    }
    out.push_str(rest);
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Scanner<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    col: u32,
    out: Vec<MacroToken>,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.src[self.offset..].chars().nth(1)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn push(&mut self, kind: MacroTokenKind, start: usize, pos: Pos) {
        self.out.push(MacroToken {
            kind,
            text: self.src[start..self.offset].into(),
            pos,
            span: start..self.offset,
        });
    }

    fn word(&mut self) -> &'a str {
        let start = self.offset;
        while self.peek().is_some_and(is_ident_continue) {
            self.bump();
        }
        &self.src[start..self.offset]
    }

    /// Raw text up to (not including) the next `;` or end of input, trimmed.
    fn raw_until_semi(&mut self) -> Result<(), MacroError> {
        self.skip_ws();
        let pos = self.pos();
        let start = self.offset;
        let mut end = start;
        while let Some(c) = self.peek() {
            if c == ';' {
                break;
            }
            if c == '&' || c == '%' {
                let ok = self.peek2().is_some_and(is_ident_start);
                if !ok {
                    return Err(MacroError::at(MacroErrorKind::StrayChar(c), self.pos()));
                }
            }
            self.bump();
            if !c.is_whitespace() {
                end = self.offset;
            }
        }
        self.out.push(MacroToken {
            kind: MacroTokenKind::Text,
            text: self.src[start..end].into(),
            pos,
            span: start..end,
        });
        Ok(())
    }

    fn run(mut self) -> Result<Vec<MacroToken>, MacroError> {
        loop {
            self.skip_ws();
            let pos = self.pos();
            let start = self.offset;
            let Some(c) = self.bump() else {
                self.push(MacroTokenKind::Eof, start, pos);
                return Ok(self.out);
            };
            match c {
                '%' | '&' => {
                    if !self.peek().is_some_and(is_ident_start) {
                        return Err(MacroError::at(MacroErrorKind::StrayChar(c), pos));
                    }
                    let name = self.word().to_ascii_lowercase();
                    if c == '&' {
                        self.push(MacroTokenKind::AmpRef(name), start, pos);
                        continue;
                    }
                    let kind = match name.as_str() {
                        "macro" => MacroTokenKind::PctMacro,
                        "mend" => MacroTokenKind::PctMend,
                        "let" => MacroTokenKind::PctLet,
                        "put" => MacroTokenKind::PctPut,
                        "eval" => MacroTokenKind::PctEval,
                        _ => MacroTokenKind::PctCall(name),
                    };
                    self.push(kind.clone(), start, pos);
                    match kind {
                        MacroTokenKind::PctLet => self.let_head()?,
                        MacroTokenKind::PctPut => self.put_body()?,
                        _ => {}
                    }
                }
                c if is_ident_start(c) => {
                    self.word();
                    self.push(MacroTokenKind::Ident, start, pos);
                }
                c if c.is_ascii_digit() => {
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                    self.push(MacroTokenKind::Int, start, pos);
                }
                '+' | '-' | '*' | '/' => self.push(MacroTokenKind::Op(c), start, pos),
                '(' => self.push(MacroTokenKind::LParen, start, pos),
                ')' => self.push(MacroTokenKind::RParen, start, pos),
                '=' => self.push(MacroTokenKind::Equals, start, pos),
                ';' => self.push(MacroTokenKind::Semi, start, pos),
                ',' => self.push(MacroTokenKind::Comma, start, pos),
                _ => {
                    while self.peek().is_some_and(|c| {
                        !c.is_whitespace() && !c.is_ascii_alphanumeric() && !"_%&+-*/()=;,".contains(c)
                    }) {
                        self.bump();
                    }
                    self.push(MacroTokenKind::Text, start, pos);
                }
            }
        }
    }

    /// After `%let`: `name =` then the raw value.
    fn let_head(&mut self) -> Result<(), MacroError> {
        self.skip_ws();
        let pos = self.pos();
        let start = self.offset;
        if !self.peek().is_some_and(is_ident_start) {
            return Ok(());
        }
        self.word();
        self.push(MacroTokenKind::Ident, start, pos);
        self.skip_ws();
        if self.peek() != Some('=') {
            return Ok(());
        }
        let pos = self.pos();
        let start = self.offset;
        self.bump();
        self.push(MacroTokenKind::Equals, start, pos);
        self.raw_until_semi()
    }

    /// After `%put`: either the `_user_` keyword (semicolon optional) or the
    /// raw text to print.
    fn put_body(&mut self) -> Result<(), MacroError> {
        self.skip_ws();
        let rest = &self.src[self.offset..];
        let is_user = rest.len() >= 6
            && rest[..6].eq_ignore_ascii_case("_user_")
            && !rest[6..].chars().next().is_some_and(is_ident_continue);
        if is_user {
            let pos = self.pos();
            let start = self.offset;
            for _ in 0..6 {
                self.bump();
            }
            self.push(MacroTokenKind::Text, start, pos);
            return Ok(());
        }
        self.raw_until_semi()
    }
}

/// Tokenizes macro-language source. The result always ends with `Eof`.
pub fn scan(source: &str) -> Result<Vec<MacroToken>, MacroError> {
    let stripped = strip_comments(source)?;
    scan_stripped(&stripped)
}

/// Scans source that has already been through [`strip_comments`]; token
/// spans index into `stripped`.
pub fn scan_stripped(stripped: &str) -> Result<Vec<MacroToken>, MacroError> {
    Scanner {
        src: stripped,
        offset: 0,
        line: 1,
        col: 1,
        out: Vec::new(),
    }
    .run()
}
