//! JSON forms of traces, metrics and comparison reports.
//!
//! A trace is JSON lines: a header record, one record per event, and a final
//! `{"metrics": ...}` record.

use lazylab_core::lab::{ArgStats, DivergenceReport, FirstDiff, Metrics, RunSummary};
use lazylab_core::TraceEvent;
use serde_json::{json, Map, Value};

pub const TRACE_FORMAT: &str = "lazylab-trace";
pub const TRACE_VERSION: u64 = 1;

pub fn header() -> Value {
    json!({ "format": TRACE_FORMAT, "version": TRACE_VERSION })
}

pub fn event(e: &TraceEvent) -> Value {
    json!({
        "ord": e.ordinal,
        "kind": e.kind.as_str(),
        "subject": e.subject.to_string(),
        "detail": e.detail,
    })
}

fn arg_stats(s: &ArgStats) -> Value {
    json!({ "accesses": s.accesses, "evaluations": s.evaluations, "cache_hits": s.cache_hits })
}

pub fn metrics(m: &Metrics) -> Value {
    let arguments: Map<String, Value> = m.arguments().iter().map(|(n, s)| (n.clone(), arg_stats(s))).collect();
    let resolutions: Map<String, Value> = m.resolutions.iter().map(|(n, c)| (n.clone(), json!(c))).collect();
    json!({
        "arguments": arguments,
        "resolutions": resolutions,
        "promises_created": m.promises_created,
        "forced_value_slots": m.forced_value_slots,
        "envs_created": m.envs_created,
        "envs_discarded": m.envs_discarded,
        "tables_created": m.tables_created,
        "tables_deleted": m.tables_deleted,
        "arith_evals": m.arith_evals,
        "stored_text_bytes": m.stored_text_bytes,
        "output_lines": m.output_lines,
    })
}

pub fn metrics_record(m: &Metrics) -> Value {
    json!({ "metrics": metrics(m) })
}

pub fn first_diff(d: &FirstDiff) -> Value {
    json!({ "line": d.index + 1, "left": d.left, "right": d.right })
}

fn summary(s: &RunSummary) -> Value {
    json!({ "output_lines": s.output_lines, "evaluations": s.evaluations, "memory_proxy": s.memory_proxy })
}

pub fn report(r: &DivergenceReport) -> Value {
    let mut v = json!({
        "verdict": r.verdict.as_str(),
        "first_diff": r.first_diff.as_ref().map(first_diff),
    });
    if let Some(d) = &r.metrics_delta {
        v["metrics_delta"] = json!({ "left": summary(&d.left), "right": summary(&d.right) });
    }
    v
}
