use alloc::string::String;
use alloc::vec::Vec;

use super::ast::BinOp;
use super::SyntaxError;
use crate::pos::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Ident,
    /// `<-` or `=`; the token text tells them apart.
    Assign,
    Op(BinOp),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    KwFunction,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrcToken {
    pub kind: TokenKind,
    pub text: String,
    pub pos: Pos,
}

impl SrcToken {
    pub fn line(&self) -> u32 {
        self.pos.line
    }

    pub fn col(&self) -> u32 {
        self.pos.col
    }
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, buf: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            buf.push(c);
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '.'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '.' || c == '_'
}

/// Splits funclang source into tokens. The stream always ends with `Eof`.
pub fn tokenize(source: &str) -> Result<Vec<SrcToken>, SyntaxError> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let pos = cur.pos();
        let Some(c) = cur.peek() else {
            out.push(SrcToken {
                kind: TokenKind::Eof,
                text: String::new(),
                pos,
            });
            return Ok(out);
        };
        let single = |kind| (kind, String::from(c));
        let (kind, text) = match c {
            ' ' | '\t' | '\r' | '\n' => {
                cur.bump();
                continue;
            }
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            '0'..='9' => {
                let mut text = String::new();
                cur.take_while(&mut text, |c| c.is_ascii_digit());
                if cur.peek() == Some('.') {
                    text.push('.');
                    cur.bump();
                    let before = text.len();
                    cur.take_while(&mut text, |c| c.is_ascii_digit());
                    if text.len() == before {
                        return Err(SyntaxError::Lex {
                            pos: cur.pos(),
                            ch: cur.peek().unwrap_or('.'),
                        });
                    }
                }
                out.push(SrcToken {
                    kind: TokenKind::Number,
                    text,
                    pos,
                });
                continue;
            }
            c if is_ident_start(c) => {
                let mut text = String::new();
                cur.take_while(&mut text, is_ident_continue);
                let kind = if text == "function" {
                    TokenKind::KwFunction
                } else {
                    TokenKind::Ident
                };
                out.push(SrcToken { kind, text, pos });
                continue;
            }
            '<' => {
                cur.bump();
                if cur.peek() != Some('-') {
                    return Err(SyntaxError::Lex { pos, ch: '<' });
                }
                (TokenKind::Assign, String::from("<-"))
            }
            '=' => single(TokenKind::Assign),
            '(' => single(TokenKind::LParen),
            ')' => single(TokenKind::RParen),
            '{' => single(TokenKind::LBrace),
            '}' => single(TokenKind::RBrace),
            ',' => single(TokenKind::Comma),
            c => match BinOp::from_char(c) {
                Some(op) => single(TokenKind::Op(op)),
                None => return Err(SyntaxError::Lex { pos, ch: c }),
            },
        };
        cur.bump();
        out.push(SrcToken { kind, text, pos });
    }
}
