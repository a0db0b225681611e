use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::scan::{scan_stripped, strip_comments, MacroToken, MacroTokenKind as K};
use super::{MacroError, MacroErrorKind};
use crate::pos::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroParam {
    pub name: String,
    /// Default value exactly as written (trimmed), possibly empty.
    pub default_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroDef {
    pub name: String,
    pub params: Vec<MacroParam>,
    /// Source between the header's `;` and `%mend`, unresolved.
    pub body_text: String,
    pub body: Vec<MacStmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PutArg {
    /// `%put _user_`
    User,
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacStmt {
    Define(Rc<MacroDef>),
    Let {
        name: String,
        value: String,
        pos: Pos,
    },
    Put {
        arg: PutArg,
        pos: Pos,
    },
    Invoke {
        name: String,
        args: Vec<(Option<String>, String)>,
        pos: Pos,
    },
    /// Anything outside macro statements; passed through untouched.
    OpenCode {
        text: String,
        pos: Pos,
    },
}

impl MacStmt {
    pub fn pos(&self) -> Pos {
        match self {
            MacStmt::Define(d) => d.pos,
            MacStmt::Let { pos, .. }
            | MacStmt::Put { pos, .. }
            | MacStmt::Invoke { pos, .. }
            | MacStmt::OpenCode { pos, .. } => *pos,
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: &'a [MacroToken],
    i: usize,
}

fn describe(t: &MacroToken) -> String {
    if t.kind == K::Eof {
        "end of input".to_string()
    } else {
        alloc::format!("`{}`", t.text)
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a MacroToken {
        &self.toks[self.i]
    }

    fn bump(&mut self) -> &'a MacroToken {
        let t = &self.toks[self.i];
        if t.kind != K::Eof {
            self.i += 1;
        }
        t
    }

    fn error(&self, expected: &'static str) -> MacroError {
        let t = self.peek();
        MacroError::at(
            MacroErrorKind::Parse {
                expected,
                found: describe(t),
            },
            t.pos,
        )
    }

    fn expect(&mut self, kind: K, what: &'static str) -> Result<&'a MacroToken, MacroError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.error(what))
        }
    }

    fn eat(&mut self, kind: K) -> bool {
        if self.peek().kind == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn stmts(&mut self, inside_macro: bool) -> Result<Vec<MacStmt>, MacroError> {
        let mut out = Vec::new();
        loop {
            let t = self.peek();
            match &t.kind {
                K::Eof => return Ok(out),
                K::PctMend if inside_macro => return Ok(out),
                K::PctMend => return Err(self.error("a statement (found %mend without %macro)")),
                K::PctMacro => out.push(MacStmt::Define(Rc::new(self.define()?))),
                K::PctLet => out.push(self.let_stmt()?),
                K::PctPut => out.push(self.put_stmt()?),
                K::PctCall(_) => out.push(self.invoke()?),
                _ => out.push(self.open_code()),
            }
        }
    }

    fn define(&mut self) -> Result<MacroDef, MacroError> {
        let pos = self.bump().pos;
        let name = self.expect(K::Ident, "macro name")?.text.to_ascii_lowercase();
        let mut params: Vec<MacroParam> = Vec::new();
        if self.eat(K::LParen) && !self.eat(K::RParen) {
            loop {
                let p = self.expect(K::Ident, "parameter name")?;
                let pname = p.text.to_ascii_lowercase();
                if params.iter().any(|q| q.name == pname) {
                    return Err(MacroError::at(MacroErrorKind::DuplicateParam(pname), p.pos));
                }
                let default_text = if self.peek().kind == K::Equals {
                    let eq = self.bump();
                    self.raw_until_delim(eq.span.end)?
                } else {
                    String::new()
                };
                params.push(MacroParam {
                    name: pname,
                    default_text,
                });
                if self.eat(K::RParen) {
                    break;
                }
                self.expect(K::Comma, "`,` or `)`")?;
            }
        }
        let semi = self.expect(K::Semi, "`;` after macro header")?;
        let body_start = semi.span.end;
        let body = self.stmts(true)?;
        let mend = self.peek();
        if mend.kind != K::PctMend {
            return Err(MacroError::at(MacroErrorKind::UnterminatedMacro(name), pos));
        }
        let body_text = self.src[body_start..mend.span.start].to_string();
        self.bump();
        if self.peek().kind == K::Ident && self.peek().pos.line == mend.pos.line {
            self.bump();
        }
        self.eat(K::Semi);
        Ok(MacroDef {
            name,
            params,
            body_text,
            body,
            pos,
        })
    }

    /// Raw source from `start` to the next `,` or `)` outside parentheses.
    fn raw_until_delim(&mut self, start: usize) -> Result<String, MacroError> {
        let mut depth = 0usize;
        loop {
            let t = self.peek();
            match t.kind {
                K::LParen => depth += 1,
                K::RParen if depth > 0 => depth -= 1,
                K::RParen | K::Comma if depth == 0 => {
                    return Ok(self.src[start..t.span.start].trim().to_string());
                }
                K::Eof => return Err(self.error("`,` or `)`")),
                _ => {}
            }
            self.bump();
        }
    }

    fn let_stmt(&mut self) -> Result<MacStmt, MacroError> {
        let pos = self.bump().pos;
        let name = self.expect(K::Ident, "macro variable name")?.text.to_ascii_lowercase();
        self.expect(K::Equals, "`=`")?;
        let value = self.expect(K::Text, "value")?.text.clone();
        self.expect(K::Semi, "`;`")?;
        Ok(MacStmt::Let { name, value, pos })
    }

    fn put_stmt(&mut self) -> Result<MacStmt, MacroError> {
        let pos = self.bump().pos;
        let text = self.expect(K::Text, "text")?;
        if text.text.eq_ignore_ascii_case("_user_") {
            self.eat(K::Semi);
            return Ok(MacStmt::Put { arg: PutArg::User, pos });
        }
        let arg = PutArg::Text(text.text.clone());
        self.expect(K::Semi, "`;`")?;
        Ok(MacStmt::Put { arg, pos })
    }

    fn invoke(&mut self) -> Result<MacStmt, MacroError> {
        let t = self.bump();
        let K::PctCall(name) = &t.kind else { unreachable!() };
        let mut args = Vec::new();
        if self.peek().kind == K::LParen {
            let open = self.bump();
            let mut seg_start = open.span.end;
            loop {
                let named = self.peek().kind == K::Ident && self.toks.get(self.i + 1).map(|t| &t.kind) == Some(&K::Equals);
                let arg = if named {
                    let n = self.bump().text.to_ascii_lowercase();
                    let eq = self.bump();
                    (Some(n), self.raw_until_delim(eq.span.end)?)
                } else {
                    (None, self.raw_until_delim(seg_start)?)
                };
                let delim = self.bump();
                let empty_call = delim.kind == K::RParen && args.is_empty() && arg == (None, String::new());
                if !empty_call {
                    args.push(arg);
                }
                if delim.kind == K::RParen {
                    break;
                }
                seg_start = delim.span.end;
            }
        }
        self.eat(K::Semi);
        Ok(MacStmt::Invoke {
            name: name.clone(),
            args,
            pos: t.pos,
        })
    }

    fn open_code(&mut self) -> MacStmt {
        let first = self.bump();
        let mut last = first;
        if first.kind != K::Semi {
            loop {
                match self.peek().kind {
                    K::Eof | K::PctMacro | K::PctMend | K::PctLet | K::PctPut | K::PctCall(_) => break,
                    K::Semi => {
                        last = self.bump();
                        break;
                    }
                    _ => last = self.bump(),
                }
            }
        }
        MacStmt::OpenCode {
            text: self.src[first.span.start..last.span.end].to_string(),
            pos: first.pos,
        }
    }
}

/// Parses macro-language source into statements. Macro bodies are parsed
/// but not executed or resolved.
pub fn parse_statements(source: &str) -> Result<Vec<MacStmt>, MacroError> {
    let stripped = strip_comments(source)?;
    let toks = scan_stripped(&stripped)?;
    Parser {
        src: &stripped,
        toks: &toks,
        i: 0,
    }
    .stmts(false)
}

/// Parses a single `%macro ... %mend` block.
pub fn define_macro(source: &str) -> Result<MacroDef, MacroError> {
    let mut stmts = parse_statements(source)?;
    match (stmts.len(), stmts.pop()) {
        (1, Some(MacStmt::Define(def))) => Ok(Rc::try_unwrap(def).unwrap_or_else(|rc| (*rc).clone())),
        (_, other) => Err(MacroError::at(
            MacroErrorKind::Parse {
                expected: "a single %macro definition",
                found: alloc::format!("{} statement(s)", stmts.len() + usize::from(other.is_some())),
            },
            other.map(|s| s.pos()).unwrap_or(Pos::new(1, 1)),
        )),
    }
}
