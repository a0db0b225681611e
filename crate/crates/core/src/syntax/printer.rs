//! Canonical source printer. Parsing the printed text yields a structurally
//! identical AST.

use alloc::string::String;
use core::fmt::{self, Write};

use super::ast::{Arg, Expr, FunctionDef, Program, Stmt, StmtKind};
use crate::value::format_num;

const INDENT: &str = "  ";

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for s in &p.stmts {
        write_stmt(&mut out, s, 0).expect("writing to a String cannot fail");
        out.push('\n');
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn write_stmt(out: &mut String, s: &Stmt, depth: usize) -> fmt::Result {
    indent(out, depth);
    match &s.kind {
        StmtKind::Assign { name, expr } => {
            write!(out, "{name} <- ")?;
            write_expr(out, expr, depth)
        }
        StmtKind::Expr(e) => write_expr(out, e, depth),
        StmtKind::Print(e) => {
            out.push_str("print(");
            write_expr(out, e, depth)?;
            out.push(')');
            Ok(())
        }
    }
}

fn write_function(out: &mut String, f: &FunctionDef, depth: usize) -> fmt::Result {
    out.push_str("function(");
    for (i, p) in f.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&p.name);
        if let Some(d) = &p.default {
            out.push_str(" = ");
            write_expr(out, d, depth)?;
        }
    }
    out.push_str(") {\n");
    for s in &f.body {
        write_stmt(out, s, depth + 1)?;
        out.push('\n');
    }
    indent(out, depth);
    out.push('}');
    Ok(())
}

fn write_args(out: &mut String, args: &[Arg], depth: usize) -> fmt::Result {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if let Some(n) = &a.name {
            write!(out, "{n} = ")?;
        }
        write_expr(out, &a.expr, depth)?;
    }
    out.push(')');
    Ok(())
}

fn write_expr(out: &mut String, e: &Expr, depth: usize) -> fmt::Result {
    match e {
        Expr::Number(v) => out.push_str(&format_num(*v)),
        Expr::Ident(n) => out.push_str(n),
        Expr::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            write_operand(out, lhs, depth, |p| p < prec)?;
            write!(out, " {} ", op.symbol())?;
            write_operand(out, rhs, depth, |p| p <= prec)?;
        }
        Expr::Call { callee, args } => {
            let wrap = matches!(**callee, Expr::Binary { .. } | Expr::Function(_));
            if wrap {
                out.push('(');
            }
            write_expr(out, callee, depth)?;
            if wrap {
                out.push(')');
            }
            write_args(out, args, depth)?;
        }
        Expr::Function(f) => write_function(out, f, depth)?,
        Expr::Vector(elems) => {
            out.push_str("c(");
            for (i, el) in elems.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, el, depth)?;
            }
            out.push(')');
        }
    }
    Ok(())
}

fn write_operand(
    out: &mut String,
    e: &Expr,
    depth: usize,
    needs_parens: impl Fn(u8) -> bool,
) -> fmt::Result {
    let wrap = match e {
        Expr::Binary { op, .. } => needs_parens(op.precedence()),
        Expr::Function(_) => true,
        _ => false,
    };
    if wrap {
        out.push('(');
    }
    write_expr(out, e, depth)?;
    if wrap {
        out.push(')');
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, 0)?;
        f.write_str(&s)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}
