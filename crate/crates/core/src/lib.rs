//! Evaluation-strategy laboratory.
//!
//! Two small languages share one trace format:
//!
//! * a functional language ([`eval`]) whose arguments are promises, run
//!   strictly, by need (memoised promises) or by name (re-evaluated on every
//!   read);
//! * a macro language ([`maclang`]) where parameters are stored as text and
//!   resolved by substitution at each reference.
//!
//! [`lab`] compares them: metrics derived from traces, output diffs, paired
//! runs of the reference programs and a random program generator.

#![no_std]

extern crate alloc;

pub mod env;
pub mod eval;
pub mod lab;
pub mod maclang;
pub mod pos;
pub mod programs;
pub mod promise;
pub mod syntax;
pub mod trace;
pub mod value;

pub use eval::{run_program, EvalError, EvalErrorKind, Interp, Output, RunError, Strategy, MAX_DEPTH};
pub use maclang::{run_session, MacroError, MacroErrorKind, MacroOutput, SessionError};
pub use pos::Pos;
pub use syntax::{parse, SyntaxError};
pub use trace::{EventKind, NullSink, Subject, TraceEvent, TraceLog, TraceSink};
pub use value::{format_num, Value};
