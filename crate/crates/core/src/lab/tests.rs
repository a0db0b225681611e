use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;
use crate::env::EnvId;
use crate::maclang::TableLabel;
use crate::programs::*;
use crate::promise::PromiseId;
use crate::trace::{EventKind, Subject, TraceSink};

fn strs(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn need(src: &str) -> LabRun {
    run_with_metrics(src, Engine::Func(Strategy::Need)).unwrap()
}

#[test]
fn program2_need_metrics() {
    let run = need(FUNC_PROGRAM2);
    assert_eq!(run.lines, strs(&["20", "20"]));
    let y = run.metrics.argument("y");
    assert_eq!((y.accesses, y.evaluations, y.cache_hits), (2, 1, 1));
    let hits: Vec<_> = run.events.iter().filter(|e| e.kind == EventKind::PromiseCacheHit).collect();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].subject.to_string(), "promise#1(y)");
    // x is never read through its promise: the body rebinds it first
    assert_eq!(run.metrics.argument("x"), ArgStats::default());
}

#[test]
fn program2_macro_metrics() {
    let run = run_with_metrics(MACRO_PROGRAM2, Engine::Macro).unwrap();
    assert_eq!(run.lines, strs(&["20", "100"]));
    assert_eq!(run.metrics.resolutions_of("y"), 2);
    assert_eq!(run.metrics.resolutions_of("x"), 2);
    assert_eq!(run.metrics.arith_evals, 2);
    assert_eq!((run.metrics.tables_created, run.metrics.tables_deleted), (1, 1));
}

#[test]
fn name_reevaluations_match_macro_resolutions() {
    let name = run_with_metrics(FUNC_PROGRAM2, Engine::Func(Strategy::Name)).unwrap();
    let mac = run_with_metrics(MACRO_PROGRAM2, Engine::Macro).unwrap();
    let reevals = name.events.iter().filter(|e| e.kind == EventKind::NameReeval).count() as u64;
    assert_eq!(reevals, mac.metrics.resolutions_of("y"));
    assert_eq!(name.metrics.argument("y").evaluations, 2);
}

#[test]
fn empty_program_counts_nothing() {
    for engine in [Engine::Func(Strategy::Strict), Engine::Func(Strategy::Need), Engine::Func(Strategy::Name), Engine::Macro] {
        let run = run_with_metrics("", engine).unwrap();
        assert!(run.lines.is_empty());
        assert!(run.events.is_empty());
        assert_eq!(run.metrics, Metrics::default());
    }
}

#[test]
fn stored_text_peak() {
    // x=5, y=&x*10, z=&a+&b (1+5+5), then x=2 replaces 5, a=3 and b=4 are added
    let run = run_with_metrics(MACRO_PROGRAM1, Engine::Macro).unwrap();
    assert_eq!(run.metrics.stored_text_bytes, 1 + 5 + 5 + 1 + 1);
    assert_eq!(run.put_lines, strs(&["(2 20 7)"]));
    assert_eq!(run.lines.len(), 4);
}

#[test]
fn metrics_from_hand_built_trace() {
    let mut log = crate::trace::TraceLog::new();
    let p = |i| Subject::Promise { id: PromiseId::from_index(i), name: "a".into() };
    let t = TableLabel::Local { macro_name: "m".into(), ordinal: 1 };
    let var = |n: &str| Subject::MacroVar { table: t.clone(), name: n.into() };
    log.emit(EventKind::EnvCreated, Subject::Env(EnvId::GLOBAL), String::new());
    log.emit(EventKind::PromiseCreated, p(0), String::new());
    log.emit(EventKind::PromiseCreated, p(1), String::new());
    log.emit(EventKind::PromiseForced, p(0), String::new());
    log.emit(EventKind::PromiseCacheHit, p(0), String::new());
    log.emit(EventKind::NameReeval, p(1), String::new());
    log.emit(EventKind::NameReeval, p(1), String::new());
    log.emit(EventKind::TableCreated, Subject::Table(t.clone()), String::new());
    log.emit(EventKind::VarStored, var("x"), "abc".into());
    log.emit(EventKind::VarStored, var("y"), "de".into());
    log.emit(EventKind::VarStored, var("x"), "a".into());
    log.emit(EventKind::VarResolved, var("x"), "a".into());
    log.emit(EventKind::TableDeleted, Subject::Table(t.clone()), String::new());
    log.emit(EventKind::TableCreated, Subject::Table(t.clone()), String::new());
    log.emit(EventKind::VarStored, var("z"), "q".into());
    log.emit(EventKind::OutputLine, Subject::Output, "1".into());
    let m = Metrics::from_events(log.events());
    assert_eq!(m.envs_created, 1);
    assert_eq!(m.promises_created, 2);
    assert_eq!(m.forced_value_slots, 1);
    assert_eq!(m.argument("a"), ArgStats { accesses: 4, evaluations: 3, cache_hits: 1 });
    assert_eq!(m.max_evaluations_per_promise(), 2);
    assert_eq!(m.stored_text_bytes, 5);
    assert_eq!(m.resolutions_of("x"), 1);
    assert_eq!((m.tables_created, m.tables_deleted, m.output_lines), (2, 1, 1));
}

#[test]
fn diff_examples() {
    let need = need(FUNC_PROGRAM2).lines;
    let name = run_with_metrics(FUNC_PROGRAM2, Engine::Func(Strategy::Name)).unwrap().lines;
    let r = diff_outputs(&need, &name);
    assert_eq!(r.verdict, Verdict::Diverged);
    assert_eq!(
        r.first_diff,
        Some(FirstDiff { index: 1, left: Some("20".into()), right: Some("100".into()) })
    );
    assert_eq!(diff_outputs(&need, &need).verdict, Verdict::Equal);
    assert_eq!(diff_outputs::<&str>(&[], &[]).first_diff, None);
    let r = diff_outputs(&["a"], &["a", "b"]);
    assert_eq!(r.first_diff, Some(FirstDiff { index: 1, left: None, right: Some("b".into()) }));
}

#[test]
fn paired_verdicts() {
    let sources = PairSources::default();
    for pair in Pair::ALL {
        let r = paired_run(pair, &sources).unwrap();
        assert_eq!(r.verdict, pair.expected(), "{pair}");
        assert_eq!(r.verdict == Verdict::Diverged, r.first_diff.is_some());
        assert_eq!(paired_run(pair, &sources).unwrap(), r);
    }
    let r = paired_run(Pair::Program2, &sources).unwrap();
    assert_eq!(r.first_diff.unwrap(), FirstDiff { index: 1, left: Some("20".into()), right: Some("100".into()) });
    let delta = r.metrics_delta.unwrap();
    assert_eq!(delta.left.memory_proxy, 1);
    // x=5, y=&x*10, then x=10 grows x to two bytes
    assert_eq!(delta.right.memory_proxy, 2 + 5);
}

#[test]
fn broken_pair_source_reports_its_side() {
    let sources = PairSources {
        macro1: "%lazy()".into(),
        ..PairSources::default()
    };
    let err = paired_run(Pair::Program1, &sources).unwrap_err();
    assert_eq!(err.engine, Engine::Macro);
    assert_eq!(err.error.message(), "macro `lazy` is not defined");
}

#[test]
fn errors_keep_partial_trace() {
    let err = run_with_metrics("print(1)\nq", Engine::Func(Strategy::Need)).unwrap_err();
    assert_eq!(err.lines, strs(&["1"]));
    assert_eq!(err.events.len(), 1);
    assert_eq!(err.pos(), Some(Pos::new(2, 1)));
    assert_eq!(err.to_string(), "2:1: object `q` not found");
    let err = run_with_metrics("x <- (1", Engine::Func(Strategy::Need)).unwrap_err();
    assert!(matches!(err.kind, LabErrorKind::Syntax(_)));
    assert!(!err.message().starts_with("1:"));
}

/// Prefix of `events` up to and including the last event matching `stop`.
fn prefix_through(events: &[TraceEvent], stop: impl Fn(&TraceEvent) -> bool) -> &[TraceEvent] {
    let end = events.iter().rposition(stop).expect("event present");
    &events[..=end]
}

#[test]
fn unforced_promises_hold_no_values() {
    let func = need(FUNC_PROGRAM1);
    let before_reads = prefix_through(&func.events, |e| e.kind == EventKind::PromiseCreated);
    let m = Metrics::from_events(before_reads);
    assert_eq!((m.promises_created, m.forced_value_slots), (3, 0));
    assert_eq!(func.metrics.forced_value_slots, 2);

    let mac = run_with_metrics(MACRO_PROGRAM1, Engine::Macro).unwrap();
    let params = prefix_through(&mac.events, |e| {
        e.kind == EventKind::VarStored && matches!(&e.subject, Subject::MacroVar { name, .. } if name == "z")
    });
    assert_eq!(Metrics::from_events(params).stored_text_bytes, 1 + 5 + 5);
}

#[test]
fn generated_programs_are_valid() {
    let src = generate_program(0, 10);
    let run = run_with_metrics(&src, Engine::Func(Strategy::Strict)).unwrap();
    assert!(!run.lines.is_empty(), "{src}");
    assert_eq!(generate_program(0, 10), src);
    assert_ne!(generate_program(1, 10), src);
    assert_eq!(generate_program(7, 0), generate_program(7, 1));
}

#[test]
fn mutants_separate_need_from_name() {
    for seed in 0..50 {
        let src = generate_mutant(seed, 12);
        let need = need(&src);
        let name = run_with_metrics(&src, Engine::Func(Strategy::Name)).unwrap();
        assert_eq!(diff_outputs(&need.lines, &name.lines).verdict, Verdict::Diverged, "{src}");
        let strict = run_with_metrics(&src, Engine::Func(Strategy::Strict));
        assert!(strict.is_err(), "{src}");
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;
    use crate::eval::Strategy;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn strategies_agree(seed in any::<u64>(), size in 1usize..40) {
            let src = generate_program(seed, size);
            let strict = run_with_metrics(&src, Engine::Func(Strategy::Strict)).unwrap();
            let need = run_with_metrics(&src, Engine::Func(Strategy::Need)).unwrap();
            let name = run_with_metrics(&src, Engine::Func(Strategy::Name)).unwrap();
            prop_assert_eq!(&need.lines, &strict.lines, "{}", src);
            prop_assert_eq!(&name.lines, &strict.lines, "{}", src);
            prop_assert!(need.metrics.max_evaluations_per_promise() <= 1);
            // strict evaluates each parameter once per call
            let calls = strict.metrics.envs_created;
            for (arg, n) in need.metrics.arguments() {
                prop_assert!(n.evaluations <= name.metrics.argument(&arg).evaluations);
                prop_assert!(n.evaluations <= calls);
            }
            prop_assert!(need.metrics.forced_value_slots <= need.metrics.promises_created);
            prop_assert_eq!(need.metrics.envs_created, need.metrics.envs_discarded);
        }

        #[test]
        fn generation_is_deterministic(seed in any::<u64>(), size in 1usize..40) {
            prop_assert_eq!(generate_program(seed, size), generate_program(seed, size));
            prop_assert_eq!(generate_mutant(seed, size), generate_mutant(seed, size));
        }
    }
}
