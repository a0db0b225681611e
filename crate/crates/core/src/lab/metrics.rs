use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::maclang::TableLabel;
use crate::trace::{EventKind, Subject, TraceEvent};

/// Reads of one promise, or of every promise bound to one parameter name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ArgStats {
    /// Forces, cache hits and re-evaluations.
    pub accesses: u64,
    /// Reads that ran the argument expression.
    pub evaluations: u64,
    pub cache_hits: u64,
}

impl ArgStats {
    fn add(&mut self, kind: EventKind) {
        self.accesses += 1;
        match kind {
            EventKind::PromiseCacheHit => self.cache_hits += 1,
            _ => self.evaluations += 1,
        }
    }
}

/// Counters aggregated from a trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Metrics {
    /// Keyed by promise index; the name is the parameter the promise binds.
    pub promises: BTreeMap<usize, (String, ArgStats)>,
    /// Macro variable resolutions by name, over all tables.
    pub resolutions: BTreeMap<String, u64>,
    pub promises_created: u64,
    /// Promises holding a computed value: one per PROMISE_FORCED.
    pub forced_value_slots: u64,
    pub envs_created: u64,
    pub envs_discarded: u64,
    pub tables_created: u64,
    pub tables_deleted: u64,
    pub arith_evals: u64,
    /// Peak total length of the text held in live symbol tables.
    pub stored_text_bytes: u64,
    pub output_lines: u64,
}

impl Metrics {
    pub fn from_events(events: &[TraceEvent]) -> Metrics {
        let mut m = Metrics::default();
        let mut live_text: BTreeMap<(TableLabel, String), u64> = BTreeMap::new();
        let mut live_total = 0u64;
        for e in events {
            match (e.kind, &e.subject) {
                (EventKind::EnvCreated, _) => m.envs_created += 1,
                (EventKind::EnvDiscarded, _) => m.envs_discarded += 1,
                (EventKind::PromiseCreated, Subject::Promise { id, name }) => {
                    m.promises_created += 1;
                    m.promises.insert(id.index(), (name.clone(), ArgStats::default()));
                }
                (
                    k @ (EventKind::PromiseForced | EventKind::PromiseCacheHit | EventKind::NameReeval),
                    Subject::Promise { id, name },
                ) => {
                    if k == EventKind::PromiseForced {
                        m.forced_value_slots += 1;
                    }
                    m.promises
                        .entry(id.index())
                        .or_insert_with(|| (name.clone(), ArgStats::default()))
                        .1
                        .add(k);
                }
                (EventKind::TableCreated, _) => m.tables_created += 1,
                (EventKind::TableDeleted, Subject::Table(label)) => {
                    m.tables_deleted += 1;
                    let dropped: u64 = live_text
                        .iter()
                        .filter(|((t, _), _)| t == label)
                        .map(|(_, len)| *len)
                        .sum();
                    live_text.retain(|(t, _), _| t != label);
                    live_total -= dropped;
                }
                (EventKind::VarStored, Subject::MacroVar { table, name }) => {
                    let len = e.detail.len() as u64;
                    let old = live_text.insert((table.clone(), name.clone()), len).unwrap_or(0);
                    live_total = live_total - old + len;
                    m.stored_text_bytes = m.stored_text_bytes.max(live_total);
                }
                (EventKind::VarResolved, Subject::MacroVar { name, .. }) => {
                    *m.resolutions.entry(name.clone()).or_default() += 1;
                }
                (EventKind::ArithEval, _) => m.arith_evals += 1,
                (EventKind::OutputLine, _) => m.output_lines += 1,
                _ => {}
            }
        }
        m
    }

    /// Totals over every promise bound to parameter `name`.
    pub fn argument(&self, name: &str) -> ArgStats {
        self.promises
            .values()
            .filter(|(n, _)| n == name)
            .fold(ArgStats::default(), |mut acc, (_, s)| {
                acc.accesses += s.accesses;
                acc.evaluations += s.evaluations;
                acc.cache_hits += s.cache_hits;
                acc
            })
    }

    /// Per-parameter totals, by name.
    pub fn arguments(&self) -> BTreeMap<String, ArgStats> {
        let mut out = BTreeMap::new();
        for name in self.promises.values().map(|(n, _)| n) {
            if !out.contains_key(name) {
                out.insert(name.clone(), self.argument(name));
            }
        }
        out
    }

    pub fn resolutions_of(&self, name: &str) -> u64 {
        self.resolutions.get(name).copied().unwrap_or(0)
    }

    /// Argument-expression evaluations over the whole run.
    pub fn total_evaluations(&self) -> u64 {
        self.promises.values().map(|(_, s)| s.evaluations).sum()
    }

    pub fn max_evaluations_per_promise(&self) -> u64 {
        self.promises.values().map(|(_, s)| s.evaluations).max().unwrap_or(0)
    }
}
