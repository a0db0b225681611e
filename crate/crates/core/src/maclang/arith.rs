//! Integer arithmetic for `%eval`: `+ - * /`, unary signs and parentheses.
//! Division truncates toward zero.

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("%eval: invalid integer expression `{0}`")]
    Syntax(String),
    #[error("%eval: division by zero")]
    DivisionByZero,
    #[error("%eval: integer overflow in `{0}`")]
    Overflow(String),
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn syntax(&self) -> ArithError {
        ArithError::Syntax(self.text.into())
    }

    fn overflow(&self) -> ArithError {
        ArithError::Overflow(self.text.into())
    }

    fn skip_ws(&mut self) {
        while self.i < self.bytes.len() && self.bytes[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<i64, ArithError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.checked_add(rhs) } else { acc.checked_sub(rhs) }.ok_or_else(|| self.overflow())?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<i64, ArithError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                acc.checked_mul(rhs).ok_or_else(|| self.overflow())?
            } else if rhs == 0 {
                return Err(ArithError::DivisionByZero);
            } else {
                acc.checked_div(rhs).ok_or_else(|| self.overflow())?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<i64, ArithError> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                self.unary()?.checked_neg().ok_or_else(|| self.overflow())
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<i64, ArithError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax());
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.bytes.len() && self.bytes[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                self.text[start..self.i].parse().map_err(|_| self.overflow())
            }
            _ => Err(self.syntax()),
        }
    }
}

/// Evaluates fully resolved `%eval` text.
pub fn eval_arith(text: &str) -> Result<i64, ArithError> {
    let mut p = Parser {
        text,
        bytes: text.as_bytes(),
        i: 0,
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.syntax());
    }
    Ok(v)
}
