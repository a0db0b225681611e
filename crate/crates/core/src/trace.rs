//! Ordered instrumentation records emitted by both engines.
//!
//! Each engine reports what it does (frames created, promises forced, symbol
//! table entries stored and resolved) to a [`TraceSink`]. [`TraceLog`] keeps
//! the events in order; [`NullSink`] drops them.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::env::EnvId;
use crate::maclang::TableLabel;
use crate::promise::PromiseId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    EnvCreated,
    EnvDiscarded,
    PromiseCreated,
    PromiseForced,
    PromiseCacheHit,
    NameReeval,
    TableCreated,
    TableDeleted,
    VarStored,
    VarResolved,
    ArithEval,
    OutputLine,
}

impl EventKind {
    pub const ALL: [EventKind; 12] = [
        EventKind::EnvCreated,
        EventKind::EnvDiscarded,
        EventKind::PromiseCreated,
        EventKind::PromiseForced,
        EventKind::PromiseCacheHit,
        EventKind::NameReeval,
        EventKind::TableCreated,
        EventKind::TableDeleted,
        EventKind::VarStored,
        EventKind::VarResolved,
        EventKind::ArithEval,
        EventKind::OutputLine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::EnvCreated => "ENV_CREATED",
            EventKind::EnvDiscarded => "ENV_DISCARDED",
            EventKind::PromiseCreated => "PROMISE_CREATED",
            EventKind::PromiseForced => "PROMISE_FORCED",
            EventKind::PromiseCacheHit => "PROMISE_CACHE_HIT",
            EventKind::NameReeval => "NAME_REEVAL",
            EventKind::TableCreated => "TABLE_CREATED",
            EventKind::TableDeleted => "TABLE_DELETED",
            EventKind::VarStored => "VAR_STORED",
            EventKind::VarResolved => "VAR_RESOLVED",
            EventKind::ArithEval => "ARITH_EVAL",
            EventKind::OutputLine => "OUTPUT_LINE",
        }
    }

    pub fn parse(s: &str) -> Option<EventKind> {
        EventKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What an event is about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Env(EnvId),
    Promise { id: PromiseId, name: String },
    /// A funclang variable bound in an environment frame.
    Binding { env: EnvId, name: String },
    Table(TableLabel),
    /// A macro variable entry in a symbol table.
    MacroVar { table: TableLabel, name: String },
    Output,
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Env(id) => write!(f, "{id}"),
            Subject::Promise { id, name } => write!(f, "{id}({name})"),
            Subject::Binding { env, name } => write!(f, "{name}@{env}"),
            Subject::Table(t) => write!(f, "{t}"),
            Subject::MacroVar { table, name } => write!(f, "{name}@{table}"),
            Subject::Output => f.write_str("output"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub ordinal: u64,
    pub kind: EventKind,
    pub subject: Subject,
    pub detail: String,
}

pub trait TraceSink {
    fn emit(&mut self, kind: EventKind, subject: Subject, detail: String);
}

/// Discards every event.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn emit(&mut self, _: EventKind, _: Subject, _: String) {}
}

/// Records events in emission order, numbering them from 1.
#[derive(Debug, Default, Clone)]
pub struct TraceLog {
    events: Vec<TraceEvent>,
}

impl TraceLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<TraceEvent> {
        self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

impl TraceSink for TraceLog {
    fn emit(&mut self, kind: EventKind, subject: Subject, detail: String) {
        let ordinal = self.events.len() as u64 + 1;
        self.events.push(TraceEvent {
            ordinal,
            kind,
            subject,
            detail,
        });
    }
}

impl<S: TraceSink + ?Sized> TraceSink for &mut S {
    fn emit(&mut self, kind: EventKind, subject: Subject, detail: String) {
        (**self).emit(kind, subject, detail)
    }
}
