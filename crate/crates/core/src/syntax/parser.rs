use alloc::boxed::Box;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::{Arg, Expr, FunctionDef, Param, Program, Stmt, StmtKind};
use super::lexer::{SrcToken, TokenKind};
use super::SyntaxError;
use crate::pos::Pos;

/// Parses a token stream (ending in `Eof`) into a program.
///
/// Statements end at a line break. Inside parentheses line breaks are
/// insignificant; a function body in braces switches back to line-oriented
/// statements.
pub fn parse_program(tokens: &[SrcToken]) -> Result<Program, SyntaxError> {
    if tokens.last().map(|t| t.kind) != Some(TokenKind::Eof) {
        let pos = tokens.last().map(|t| t.pos).unwrap_or(Pos::new(1, 1));
        return Err(SyntaxError::Parse {
            pos,
            expected: vec!["end of input"],
            found: "missing Eof".into(),
        });
    }
    let mut p = Parser {
        tokens,
        idx: 0,
        paren_depth: 0,
    };
    let stmts = p.stmt_list(TokenKind::Eof)?;
    Ok(Program { stmts })
}

struct Parser<'t> {
    tokens: &'t [SrcToken],
    idx: usize,
    paren_depth: u32,
}

fn describe(tok: &SrcToken) -> String {
    match tok.kind {
        TokenKind::Eof => "end of input".to_string(),
        _ => alloc::format!("`{}`", tok.text),
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t SrcToken {
        &self.tokens[self.idx]
    }

    fn peek_at(&self, n: usize) -> &'t SrcToken {
        let i = (self.idx + n).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn bump(&mut self) -> &'t SrcToken {
        let t = &self.tokens[self.idx];
        if t.kind != TokenKind::Eof {
            self.idx += 1;
        }
        t
    }

    fn prev_line(&self) -> Option<u32> {
        self.idx.checked_sub(1).map(|i| self.tokens[i].line())
    }

    /// Whether the next token may continue the current expression: always
    /// inside parentheses, otherwise only on the same line.
    fn continues(&self) -> bool {
        self.paren_depth > 0 || self.prev_line() == Some(self.peek().line())
    }

    fn error(&self, expected: &[&'static str]) -> SyntaxError {
        let tok = self.peek();
        SyntaxError::Parse {
            pos: tok.pos,
            expected: expected.to_vec(),
            found: describe(tok),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &'static str) -> Result<&'t SrcToken, SyntaxError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn stmt_list(&mut self, end: TokenKind) -> Result<Vec<Stmt>, SyntaxError> {
        let saved = core::mem::replace(&mut self.paren_depth, 0);
        let mut stmts = Vec::new();
        while self.peek().kind != end {
            if self.peek().kind == TokenKind::Eof {
                return Err(self.error(&["`}`"]));
            }
            stmts.push(self.stmt()?);
            let next = self.peek();
            if next.kind != end && next.kind != TokenKind::Eof && self.prev_line() == Some(next.line()) {
                return Err(self.error(&["line break"]));
            }
        }
        self.paren_depth = saved;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let first = self.peek();
        let pos = first.pos;
        if first.kind == TokenKind::Ident && self.peek_at(1).kind == TokenKind::Assign {
            let name = self.bump().text.clone();
            self.bump();
            let expr = self.expr(0)?;
            return Ok(Stmt::new(StmtKind::Assign { name, expr }, pos));
        }
        if first.kind == TokenKind::Ident
            && first.text == "print"
            && self.peek_at(1).kind == TokenKind::LParen
        {
            self.bump();
            let open = self.peek().pos;
            let mut args = self.call_args()?;
            if args.len() != 1 || args[0].name.is_some() {
                return Err(SyntaxError::Parse {
                    pos: open,
                    expected: vec!["exactly one unnamed argument to print"],
                    found: alloc::format!("{} argument(s)", args.len()),
                });
            }
            let arg = args.pop().expect("one argument");
            let expr = Rc::try_unwrap(arg.expr).unwrap_or_else(|rc| (*rc).clone());
            return Ok(Stmt::new(StmtKind::Print(expr), pos));
        }
        let expr = self.expr(0)?;
        Ok(Stmt::new(StmtKind::Expr(expr), pos))
    }

    fn expr(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.postfix()?;
        while let TokenKind::Op(op) = self.peek().kind {
            if op.precedence() < min_prec || !self.continues() {
                break;
            }
            self.bump();
            let rhs = self.expr(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.primary()?;
        while self.peek().kind == TokenKind::LParen && self.continues() {
            let args = self.call_args()?;
            e = Expr::Call {
                callee: Box::new(e),
                args,
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let tok = self.peek();
        match tok.kind {
            TokenKind::Number => {
                self.bump();
                let value = tok.text.parse::<f64>().map_err(|_| SyntaxError::Parse {
                    pos: tok.pos,
                    expected: vec!["number"],
                    found: describe(tok),
                })?;
                Ok(Expr::Number(value))
            }
            TokenKind::Ident => {
                self.bump();
                if tok.text == "c" && self.peek().kind == TokenKind::LParen && self.continues() {
                    let open = self.peek().pos;
                    let args = self.call_args()?;
                    let mut elems = Vec::with_capacity(args.len());
                    for a in args {
                        if a.name.is_some() {
                            return Err(SyntaxError::Parse {
                                pos: open,
                                expected: vec!["unnamed vector element"],
                                found: "named argument".into(),
                            });
                        }
                        elems.push(Rc::try_unwrap(a.expr).unwrap_or_else(|rc| (*rc).clone()));
                    }
                    return Ok(Expr::Vector(elems));
                }
                Ok(Expr::Ident(tok.text.clone()))
            }
            TokenKind::LParen => {
                self.bump();
                self.paren_depth += 1;
                let e = self.expr(0)?;
                self.expect(TokenKind::RParen, "`)`")?;
                self.paren_depth -= 1;
                Ok(e)
            }
            TokenKind::KwFunction => self.function(),
            _ => Err(self.error(&["number", "identifier", "`(`", "`function`"])),
        }
    }

    fn function(&mut self) -> Result<Expr, SyntaxError> {
        self.bump();
        self.expect(TokenKind::LParen, "`(`")?;
        self.paren_depth += 1;
        let mut params: Vec<Param> = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            loop {
                let name_tok = self.expect(TokenKind::Ident, "parameter name")?;
                if params.iter().any(|p| p.name == name_tok.text) {
                    return Err(SyntaxError::DuplicateParam {
                        pos: name_tok.pos,
                        name: name_tok.text.clone(),
                    });
                }
                let default = if self.peek().kind == TokenKind::Assign && self.peek().text == "=" {
                    self.bump();
                    Some(Rc::new(self.expr(0)?))
                } else {
                    None
                };
                params.push(Param {
                    name: name_tok.text.clone(),
                    default,
                });
                if self.peek().kind == TokenKind::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        self.paren_depth -= 1;
        self.expect(TokenKind::LBrace, "`{`")?;
        let body = self.stmt_list(TokenKind::RBrace)?;
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(Expr::Function(Rc::new(FunctionDef { params, body })))
    }

    /// `( [name =] expr, ... )`
    fn call_args(&mut self) -> Result<Vec<Arg>, SyntaxError> {
        self.expect(TokenKind::LParen, "`(`")?;
        self.paren_depth += 1;
        let mut args: Vec<Arg> = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            loop {
                let tok = self.peek();
                let name = if tok.kind == TokenKind::Ident
                    && self.peek_at(1).kind == TokenKind::Assign
                    && self.peek_at(1).text == "="
                {
                    if args.iter().any(|a| a.name.as_deref() == Some(tok.text.as_str())) {
                        return Err(SyntaxError::DuplicateArg {
                            pos: tok.pos,
                            name: tok.text.clone(),
                        });
                    }
                    self.bump();
                    self.bump();
                    Some(tok.text.clone())
                } else {
                    None
                };
                let expr = Rc::new(self.expr(0)?);
                args.push(Arg { name, expr });
                if self.peek().kind == TokenKind::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)` or `,`")?;
        self.paren_depth -= 1;
        Ok(args)
    }
}
