//! Runs programs under a trace, derives metrics, compares outputs and
//! generates random programs for differential testing.

mod generate;
mod metrics;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::eval::{run_program, EvalError, Strategy};
use crate::maclang::{run_session, MacroError};
use crate::pos::Pos;
use crate::programs;
use crate::syntax::{parse, SyntaxError};
use crate::trace::{TraceEvent, TraceLog};

pub use generate::{generate_mutant, generate_program, GenMode};
pub use metrics::{ArgStats, Metrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Func(Strategy),
    Macro,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Func(s) => write!(f, "func/{s}"),
            Engine::Macro => f.write_str("macro"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabRun {
    /// Everything the program printed.
    pub lines: Vec<String>,
    /// Lines compared across languages: for macro runs, the `%put` text
    /// without `_user_` listings.
    pub put_lines: Vec<String>,
    pub metrics: Metrics,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LabErrorKind {
    Syntax(SyntaxError),
    Eval(EvalError),
    Macro(MacroError),
}

/// A failed run with the output and trace produced before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct LabError {
    pub kind: LabErrorKind,
    pub lines: Vec<String>,
    pub events: Vec<TraceEvent>,
}

impl LabError {
    fn bare(kind: LabErrorKind) -> Self {
        LabError {
            kind,
            lines: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn pos(&self) -> Option<Pos> {
        match &self.kind {
            LabErrorKind::Syntax(e) => Some(e.pos()),
            LabErrorKind::Eval(e) => e.pos,
            LabErrorKind::Macro(e) => e.pos,
        }
    }

    /// The error text without its position.
    pub fn message(&self) -> String {
        match &self.kind {
            LabErrorKind::Syntax(e) => {
                let full = e.to_string();
                let prefix = alloc::format!("{}: ", e.pos());
                full.strip_prefix(&prefix).map_or(full.clone(), String::from)
            }
            LabErrorKind::Eval(e) => e.kind.to_string(),
            LabErrorKind::Macro(e) => e.kind.to_string(),
        }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos() {
            Some(p) => write!(f, "{p}: {}", self.message()),
            None => f.write_str(&self.message()),
        }
    }
}

impl core::error::Error for LabError {}

/// Runs `source` on `engine` with a recording sink.
pub fn run_with_metrics(source: &str, engine: Engine) -> Result<LabRun, LabError> {
    let mut log = TraceLog::new();
    let result = match engine {
        Engine::Func(strategy) => {
            let program = parse(source).map_err(|e| LabError::bare(LabErrorKind::Syntax(e)))?;
            run_program(&program, strategy, &mut log)
                .map(|out| (out.lines.clone(), out.lines))
                .map_err(|e| (LabErrorKind::Eval(e.error), e.output.lines))
        }
        Engine::Macro => run_session(source, &mut log)
            .map(|out| (out.log_lines(), out.put_lines()))
            .map_err(|e| (LabErrorKind::Macro(e.error), e.output.log_lines())),
    };
    let events = log.into_events();
    match result {
        Ok((lines, put_lines)) => Ok(LabRun {
            lines,
            put_lines,
            metrics: Metrics::from_events(&events),
            events,
        }),
        Err((kind, lines)) => Err(LabError { kind, lines, events }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equal,
    Diverged,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "EQUAL",
            Verdict::Diverged => "DIVERGED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// First differing line; a side that ran out of lines is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstDiff {
    pub index: usize,
    pub left: Option<String>,
    pub right: Option<String>,
}

/// Headline figures of one side of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunSummary {
    pub output_lines: u64,
    /// Promise evaluations (func) or reference resolutions (macro).
    pub evaluations: u64,
    /// Forced value slots (func) or peak stored text bytes (macro).
    pub memory_proxy: u64,
}

impl RunSummary {
    pub fn of(engine: Engine, m: &Metrics) -> Self {
        match engine {
            Engine::Func(_) => RunSummary {
                output_lines: m.output_lines,
                evaluations: m.total_evaluations(),
                memory_proxy: m.forced_value_slots,
            },
            Engine::Macro => RunSummary {
                output_lines: m.output_lines,
                evaluations: m.resolutions.values().sum(),
                memory_proxy: m.stored_text_bytes,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsDelta {
    pub left: RunSummary,
    pub right: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceReport {
    pub verdict: Verdict,
    pub first_diff: Option<FirstDiff>,
    pub metrics_delta: Option<MetricsDelta>,
}

pub fn diff_outputs<S: AsRef<str>>(a: &[S], b: &[S]) -> DivergenceReport {
    let first_diff = (0..a.len().max(b.len()))
        .find(|&i| a.get(i).map(AsRef::as_ref) != b.get(i).map(AsRef::as_ref))
        .map(|index| FirstDiff {
            index,
            left: a.get(index).map(|s| s.as_ref().to_string()),
            right: b.get(index).map(|s| s.as_ref().to_string()),
        });
    DivergenceReport {
        verdict: if first_diff.is_some() {
            Verdict::Diverged
        } else {
            Verdict::Equal
        },
        first_diff,
        metrics_delta: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    Program1,
    Program2,
    Program2Name,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::Program1, Pair::Program2, Pair::Program2Name];

    pub fn as_str(self) -> &'static str {
        match self {
            Pair::Program1 => "PROGRAM1",
            Pair::Program2 => "PROGRAM2",
            Pair::Program2Name => "PROGRAM2_NAME",
        }
    }

    /// The verdict the reference programs produce.
    pub fn expected(self) -> Verdict {
        match self {
            Pair::Program2 => Verdict::Diverged,
            Pair::Program1 | Pair::Program2Name => Verdict::Equal,
        }
    }

    pub fn func_strategy(self) -> Strategy {
        match self {
            Pair::Program1 | Pair::Program2 => Strategy::Need,
            Pair::Program2Name => Strategy::Name,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Source texts for the paired programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSources {
    pub func1: String,
    pub func2: String,
    pub macro1: String,
    pub macro2: String,
}

impl Default for PairSources {
    fn default() -> Self {
        PairSources {
            func1: programs::FUNC_PROGRAM1.into(),
            func2: programs::FUNC_PROGRAM2.into(),
            macro1: programs::MACRO_PROGRAM1.into(),
            macro2: programs::MACRO_PROGRAM2.into(),
        }
    }
}

/// Which side of a pair failed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairError {
    pub engine: Engine,
    pub error: LabError,
}

impl fmt::Display for PairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.engine, self.error)
    }
}

impl core::error::Error for PairError {}

/// Runs both sides of `pair` and compares their output. For `Program1` the
/// macro side's outer parentheses are removed before comparing.
pub fn paired_run(pair: Pair, sources: &PairSources) -> Result<DivergenceReport, PairError> {
    let (func_src, macro_src) = match pair {
        Pair::Program1 => (&sources.func1, &sources.macro1),
        Pair::Program2 | Pair::Program2Name => (&sources.func2, &sources.macro2),
    };
    let run = |src: &str, engine| run_with_metrics(src, engine).map_err(|error| PairError { engine, error });
    let left_engine = Engine::Func(pair.func_strategy());
    let left = run(func_src, left_engine)?;
    let right = run(macro_src, Engine::Macro)?;
    let right_lines: Vec<String> = match pair {
        Pair::Program1 => right.put_lines.iter().map(|l| strip_parens(l).into()).collect(),
        _ => right.put_lines.clone(),
    };
    let mut report = diff_outputs(&left.put_lines, &right_lines);
    report.metrics_delta = Some(MetricsDelta {
        left: RunSummary::of(left_engine, &left.metrics),
        right: RunSummary::of(Engine::Macro, &right.metrics),
    });
    Ok(report)
}

fn strip_parens(line: &str) -> &str {
    line.strip_prefix('(')
        .and_then(|l| l.strip_suffix(')'))
        .unwrap_or(line)
}

#[cfg(test)]
mod tests;
