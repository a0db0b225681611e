use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::arith::{eval_arith, ArithError};
use super::parse::{parse_statements, MacStmt, MacroDef, PutArg};
use super::table::{SymbolTable, TableLabel, TableStatus};
use super::{MacroError, MacroErrorKind};
use crate::trace::{EventKind, Subject, TraceSink};

/// Nested substitutions allowed while resolving one reference.
pub const MAX_RESCAN_DEPTH: usize = 64;
/// Macro invocations allowed on the stack at once.
pub const MAX_NESTING: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    /// Text written by `%put`.
    Put,
    /// One entry of a `%put _user_` listing.
    UserDump,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogLine {
    pub text: String,
    pub kind: LineKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MacroOutput {
    pub lines: Vec<LogLine>,
    /// Statements outside the macro language, in order, unmodified.
    pub open_code: Vec<String>,
}

impl MacroOutput {
    pub fn log_lines(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.text.clone()).collect()
    }

    /// Log lines excluding symbol-table listings.
    pub fn put_lines(&self) -> Vec<String> {
        self.lines
            .iter()
            .filter(|l| l.kind == LineKind::Put)
            .map(|l| l.text.clone())
            .collect()
    }
}

/// A failed session: the error plus the log written before it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{error}")]
pub struct SessionError {
    pub error: MacroError,
    pub output: MacroOutput,
}

/// A macro-processor session: the global symbol table, a stack of local
/// tables for active invocations, and the macro registry.
pub struct Session<'s> {
    macros: BTreeMap<String, Rc<MacroDef>>,
    tables: Vec<SymbolTable>,
    /// Indexes into `tables`; GLOBAL first, innermost last.
    stack: Vec<usize>,
    output: MacroOutput,
    sink: &'s mut dyn TraceSink,
    invocations: u32,
}

impl<'s> Session<'s> {
    pub fn new(sink: &'s mut dyn TraceSink) -> Self {
        Session {
            macros: BTreeMap::new(),
            tables: alloc::vec![SymbolTable::new(TableLabel::Global)],
            stack: alloc::vec![0],
            output: MacroOutput::default(),
            sink,
            invocations: 0,
        }
    }

    pub fn output(&self) -> &MacroOutput {
        &self.output
    }

    pub fn into_output(self) -> MacroOutput {
        self.output
    }

    /// Every table created in this session, including deleted ones.
    pub fn tables(&self) -> &[SymbolTable] {
        &self.tables
    }

    /// Live tables, innermost first.
    pub fn live_tables(&self) -> Vec<&SymbolTable> {
        self.stack.iter().rev().map(|&i| &self.tables[i]).collect()
    }

    pub fn stack_depth(&self) -> usize {
        self.stack.len()
    }

    pub fn macro_def(&self, name: &str) -> Option<&MacroDef> {
        self.macros.get(&name.to_ascii_lowercase()).map(|d| &**d)
    }

    /// Parses and executes `source` in this session.
    pub fn run(&mut self, source: &str) -> Result<(), MacroError> {
        let stmts = parse_statements(source)?;
        self.execute(&stmts)
    }

    pub fn execute(&mut self, stmts: &[MacStmt]) -> Result<(), MacroError> {
        for stmt in stmts {
            self.exec_stmt(stmt).map_err(|e| e.or_at(stmt.pos()))?;
        }
        Ok(())
    }

    fn exec_stmt(&mut self, stmt: &MacStmt) -> Result<(), MacroError> {
        match stmt {
            MacStmt::Define(def) => {
                self.macros.insert(def.name.clone(), def.clone());
                Ok(())
            }
            MacStmt::Let { name, value, .. } => self.let_stmt(name, value),
            MacStmt::Put { arg, .. } => self.put_stmt(arg),
            MacStmt::Invoke { name, args, .. } => self.invoke(name, args).map(|_| ()),
            MacStmt::OpenCode { text, .. } => {
                self.output.open_code.push(text.clone());
                Ok(())
            }
        }
    }

    fn innermost(&self) -> usize {
        *self.stack.last().expect("GLOBAL is always on the stack")
    }

    /// Innermost live table defining `name`.
    pub fn lookup(&self, name: &str) -> Option<(&TableLabel, &str)> {
        self.stack.iter().rev().find_map(|&i| {
            let t = &self.tables[i];
            t.get(name).map(|v| (&t.label, v))
        })
    }

    /// Replaces every `&name` with its table text, rescanning substituted
    /// text until no references remain. A trailing `.` ends a name and is
    /// dropped.
    pub fn resolve_text(&mut self, text: &str) -> Result<String, MacroError> {
        self.resolve_at(text, 0)
    }

    fn resolve_at(&mut self, text: &str, depth: usize) -> Result<String, MacroError> {
        let mut out = String::with_capacity(text.len());
        let mut rest = text;
        while let Some(amp) = rest.find('&') {
            out.push_str(&rest[..amp]);
            let after = &rest[amp + 1..];
            let name_len = after
                .char_indices()
                .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit()))
                .map_or(after.len(), |(i, _)| i);
            if name_len == 0 {
                out.push('&');
                rest = after;
                continue;
            }
            let name = after[..name_len].to_ascii_lowercase();
            rest = &after[name_len..];
            if let Some(r) = rest.strip_prefix('.') {
                rest = r;
            }
            if depth >= MAX_RESCAN_DEPTH {
                return Err(MacroErrorKind::DepthExceeded(name).into());
            }
            let Some((label, value)) = self.lookup(&name) else {
                return Err(MacroErrorKind::UnresolvedRef(name).into());
            };
            let (label, value) = (label.clone(), value.to_string());
            self.sink.emit(
                EventKind::VarResolved,
                Subject::MacroVar {
                    table: label,
                    name,
                },
                value.clone(),
            );
            out.push_str(&self.resolve_at(&value, depth + 1)?);
        }
        out.push_str(rest);
        Ok(out)
    }

    /// Evaluates every `%eval(...)` in already-resolved text, innermost first.
    fn expand_evals(&mut self, text: &str) -> Result<String, MacroError> {
        let lower = text.to_ascii_lowercase();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        while let Some(k) = lower[i..].find("%eval(") {
            let start = i + k;
            out.push_str(&text[i..start]);
            let open = start + "%eval(".len();
            let mut depth = 1usize;
            let mut close = None;
            for (j, b) in text.bytes().enumerate().skip(open) {
                match b {
                    b'(' => depth += 1,
                    b')' => {
                        depth -= 1;
                        if depth == 0 {
                            close = Some(j);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let Some(close) = close else {
                return Err(ArithError::Syntax(text[start..].into()).into());
            };
            let inner = self.expand_evals(&text[open..close])?;
            let value = eval_arith(&inner)?;
            let label = self.tables[self.innermost()].label.clone();
            self.sink
                .emit(EventKind::ArithEval, Subject::Table(label), alloc::format!("{} = {value}", inner.trim()));
            out.push_str(&value.to_string());
            i = close + 1;
        }
        out.push_str(&text[i..]);
        Ok(out)
    }

    /// Resolves references, then evaluates `%eval` calls.
    pub fn expand(&mut self, text: &str) -> Result<String, MacroError> {
        let resolved = self.resolve_text(text)?;
        self.expand_evals(&resolved)
    }

    fn store(&mut self, table: usize, name: &str, value: String) {
        let t = &mut self.tables[table];
        self.sink.emit(
            EventKind::VarStored,
            Subject::MacroVar {
                table: t.label.clone(),
                name: name.into(),
            },
            value.clone(),
        );
        t.set(name, value);
    }

    /// `%let`: the value is expanded first, then stored in the innermost table
    /// that already has `name`, or else in the innermost table.
    pub fn let_stmt(&mut self, name: &str, raw: &str) -> Result<(), MacroError> {
        let name = name.to_ascii_lowercase();
        let value = self.expand(raw)?;
        let target = self
            .stack
            .iter()
            .rev()
            .copied()
            .find(|&i| self.tables[i].contains(&name))
            .unwrap_or_else(|| self.innermost());
        self.store(target, &name, value);
        Ok(())
    }

    fn log(&mut self, text: String, kind: LineKind) {
        self.sink.emit(EventKind::OutputLine, Subject::Output, text.clone());
        self.output.lines.push(LogLine { text, kind });
    }

    pub fn put_stmt(&mut self, arg: &PutArg) -> Result<(), MacroError> {
        match arg {
            PutArg::User => {
                let lines: Vec<String> = self
                    .live_tables()
                    .into_iter()
                    .flat_map(|t| {
                        let scope = t.label.scope_name();
                        t.entries
                            .iter()
                            .map(move |(n, v)| alloc::format!("{scope} {} {v}", n.to_ascii_uppercase()))
                    })
                    .collect();
                for l in lines {
                    self.log(l, LineKind::UserDump);
                }
            }
            PutArg::Text(raw) => {
                let text = self.expand(raw)?;
                self.log(text, LineKind::Put);
            }
        }
        Ok(())
    }

    /// Runs macro `name`: parameters are stored as raw text in a new local
    /// table (arguments override defaults), the body executes, and the table
    /// is deleted. Returns the log lines written during the invocation.
    pub fn invoke(&mut self, name: &str, args: &[(Option<String>, String)]) -> Result<Vec<LogLine>, MacroError> {
        let name = name.to_ascii_lowercase();
        let def = self
            .macros
            .get(&name)
            .cloned()
            .ok_or_else(|| MacroErrorKind::UnknownMacro(name.clone()))?;
        if self.stack.len() > MAX_NESTING {
            return Err(MacroErrorKind::NestingTooDeep.into());
        }
        let mut values: Vec<&str> = def.params.iter().map(|p| p.default_text.as_str()).collect();
        let mut positional = 0;
        for (arg_name, text) in args {
            let idx = match arg_name {
                Some(n) => {
                    let n = n.to_ascii_lowercase();
                    def.params.iter().position(|p| p.name == n).ok_or_else(|| MacroErrorKind::UnknownParam {
                        macro_name: name.clone(),
                        param: n,
                    })?
                }
                None => {
                    positional += 1;
                    if positional > def.params.len() {
                        return Err(MacroErrorKind::TooManyArgs {
                            macro_name: name.clone(),
                            given: args.iter().filter(|a| a.0.is_none()).count(),
                            max: def.params.len(),
                        }
                        .into());
                    }
                    positional - 1
                }
            };
            values[idx] = text;
        }

        self.invocations += 1;
        let label = TableLabel::Local {
            macro_name: name.clone(),
            ordinal: self.invocations,
        };
        let table = self.tables.len();
        self.tables.push(SymbolTable::new(label.clone()));
        self.stack.push(table);
        self.sink
            .emit(EventKind::TableCreated, Subject::Table(label.clone()), alloc::format!("macro={name}"));
        for (p, v) in def.params.iter().zip(values) {
            self.store(table, &p.name, v.to_string());
        }
        let first_line = self.output.lines.len();
        let result = self.execute(&def.body);
        self.stack.pop();
        self.tables[table].status = TableStatus::Deleted;
        self.sink.emit(EventKind::TableDeleted, Subject::Table(label), String::new());
        result?;
        Ok(self.output.lines[first_line..].to_vec())
    }
}

/// Runs a whole source text in a fresh session.
pub fn run_session(source: &str, sink: &mut dyn TraceSink) -> Result<MacroOutput, SessionError> {
    let mut session = Session::new(sink);
    match session.run(source) {
        Ok(()) => Ok(session.into_output()),
        Err(error) => Err(SessionError {
            error,
            output: session.into_output(),
        }),
    }
}

#[cfg(test)]
mod tests;
