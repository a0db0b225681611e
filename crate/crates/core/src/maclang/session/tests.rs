use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;
use crate::pos::Pos;
use crate::trace::{NullSink, TraceLog};

const PROGRAM1: &str = include_str!("../../../programs/sas_prog1.ml");
const PROGRAM2: &str = include_str!("../../../programs/sas_prog2.ml");

fn log(src: &str) -> Result<Vec<String>, MacroErrorKind> {
    run_session(src, &mut NullSink)
        .map(|o| o.log_lines())
        .map_err(|e| e.error.kind)
}

fn strs(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn program1_golden() {
    let out = run_session(PROGRAM1, &mut NullSink).unwrap();
    assert_eq!(
        out.log_lines(),
        strs(&["LAZY X 5", "LAZY Y &x*10", "LAZY Z &a+&b", "(2 20 7)"])
    );
    assert_eq!(out.put_lines(), strs(&["(2 20 7)"]));
}

#[test]
fn program2_golden() {
    assert_eq!(log(PROGRAM2).unwrap(), strs(&["20", "100"]));
}

#[test]
fn override_beats_default() {
    // manual substitution: y = &x*10 with x=7 -> 7*10 -> 70
    let src = "%macro lazy(x=5,y=&x*10);\n%put %eval(&y);\n%mend;\n%lazy(x=7)";
    assert_eq!(log(src).unwrap(), strs(&["70"]));
    let src = "%macro lazy(x=5,y=&x*10);\n%put %eval(&y);\n%mend;\n%lazy(3)";
    assert_eq!(log(src).unwrap(), strs(&["30"]));
}

#[test]
fn invocation_errors() {
    assert_eq!(log("%nope()").unwrap_err(), MacroErrorKind::UnknownMacro("nope".into()));
    let src = "%macro m(a=1); %mend;\n%m(b=2)";
    assert_eq!(
        log(src).unwrap_err(),
        MacroErrorKind::UnknownParam { macro_name: "m".into(), param: "b".into() }
    );
    let src = "%macro m(a=1); %mend;\n%m(1, 2)";
    assert!(matches!(log(src).unwrap_err(), MacroErrorKind::TooManyArgs { given: 2, max: 1, .. }));
    let err = run_session("%macro r; %r %mend;\n%r", &mut NullSink).unwrap_err();
    assert_eq!(err.error.kind, MacroErrorKind::NestingTooDeep);
}

fn with_tables<R>(entries: &[(&str, &str)], f: impl FnOnce(&mut Session<'_>) -> R) -> R {
    let mut sink = NullSink;
    let mut s = Session::new(&mut sink);
    for (n, v) in entries {
        s.tables[0].set(n, v.to_string());
    }
    f(&mut s)
}

#[test]
fn resolve_examples() {
    with_tables(&[("x", "2"), ("y", "&x*10")], |s| {
        assert_eq!(s.resolve_text("&y").unwrap(), "2*10");
        assert_eq!(s.resolve_text("plain").unwrap(), "plain");
        assert_eq!(s.resolve_text("&X.0 and &y.").unwrap(), "20 and 2*10");
        assert_eq!(s.resolve_text("&q").unwrap_err().kind, MacroErrorKind::UnresolvedRef("q".into()));
    });
    let err = with_tables(&[("a", "&a")], |s| s.resolve_text("&a").unwrap_err());
    assert_eq!(err.kind, MacroErrorKind::DepthExceeded("a".into()));
}

#[test]
fn rescan_bound_is_exactly_64() {
    // chain v0 -> v1 -> ... -> vN; N nested substitutions beyond the first
    let chain = |n: usize| {
        let mut entries: Vec<(String, String)> = (0..n).map(|i| (alloc::format!("v{i}"), alloc::format!("&v{}", i + 1))).collect();
        entries.push((alloc::format!("v{n}"), "end".into()));
        entries
    };
    for (n, ok) in [(MAX_RESCAN_DEPTH - 1, true), (MAX_RESCAN_DEPTH, false)] {
        let entries = chain(n);
        let refs: Vec<(&str, &str)> = entries.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let resolved = with_tables(&refs, |s| s.resolve_text("&v0"));
        assert_eq!(resolved.is_ok(), ok, "chain of {n}");
    }
}

#[test]
fn let_targets() {
    let src = "%let g=1;\n%put _user_;";
    assert_eq!(log(src).unwrap(), strs(&["GLOBAL G 1"]));
    let src = "%let x=9;\n%macro m(y=1);\n%let x=2;\n%let a=3;\n%put _user_;\n%mend;\n%m()\n%put _user_;";
    assert_eq!(
        log(src).unwrap(),
        strs(&["M Y 1", "M A 3", "GLOBAL X 2", "GLOBAL X 2"])
    );
    let src = "%macro m(x=5);\n%let x=2;\n%let a=3;\n%put _user_;\n%mend;\n%m()";
    assert_eq!(log(src).unwrap(), strs(&["M X 2", "M A 3"]));
}

#[test]
fn let_snapshots_its_value() {
    let src = "%let x=1;\n%let a=&x;\n%let x=2;\n%put &a &x;";
    assert_eq!(log(src).unwrap(), strs(&["1 2"]));
    let src = "%let x=4;\n%let a=%eval(&x*2);\n%put &a;";
    assert_eq!(log(src).unwrap(), strs(&["8"]));
}

#[test]
fn put_plain_and_nested_eval() {
    assert_eq!(log("%put hello;").unwrap(), strs(&["hello"]));
    assert_eq!(log("%put   spaced   out ;").unwrap(), strs(&["spaced   out"]));
    assert_eq!(log("%put %eval(1 + %eval(2*3));").unwrap(), strs(&["7"]));
    assert_eq!(log("%put;").unwrap(), strs(&[""]));
    assert!(matches!(log("%put %eval(2.5);").unwrap_err(), MacroErrorKind::Arith(ArithError::Syntax(_))));
    assert!(matches!(log("%put %eval(1;").unwrap_err(), MacroErrorKind::Arith(_)));
}

#[test]
fn empty_session() {
    let out = run_session("", &mut NullSink).unwrap();
    assert!(out.lines.is_empty());
}

#[test]
fn error_positions() {
    let err = run_session("%let a=1;\n  %put &missing;", &mut NullSink).unwrap_err();
    assert_eq!(err.error.pos, Some(Pos::new(2, 3)));
    assert_eq!(err.error.to_string(), "2:3: apparent symbolic reference `missing` not resolved");
    let err = run_session("%macro m;\n%put ok;\n%put &nope;\n%mend;\n%m", &mut NullSink).unwrap_err();
    assert_eq!(err.error.pos, Some(Pos::new(3, 1)));
    assert_eq!(err.output.log_lines(), strs(&["ok"]));
}

#[test]
fn tables_are_deleted_after_each_invocation() {
    let src = "%macro inner(b=2);\n%put &a &b;\n%mend;\n%macro outer(a=1);\n%inner()\n%inner(b=3)\n%mend;\n%outer()\n%outer(a=4)";
    let mut log = TraceLog::new();
    let mut session = Session::new(&mut log);
    session.run(src).unwrap();
    assert_eq!(session.output().log_lines(), strs(&["1 2", "1 3", "4 2", "4 3"]));
    assert_eq!(session.stack_depth(), 1);
    assert_eq!(session.tables().len(), 7);
    assert_eq!(session.tables()[0].status, TableStatus::Live);
    assert!(session.tables()[1..].iter().all(|t| t.status == TableStatus::Deleted));
    drop(session);
    // depth = active invocations + 1 at every point
    let mut open = 1usize;
    let mut max_open = 1usize;
    for e in log.events() {
        match e.kind {
            crate::trace::EventKind::TableCreated => open += 1,
            crate::trace::EventKind::TableDeleted => open -= 1,
            _ => {}
        }
        max_open = max_open.max(open);
    }
    assert_eq!((open, max_open), (1, 3));
}

#[test]
fn parameters_are_stored_verbatim() {
    let mut log = TraceLog::new();
    run_session(PROGRAM1, &mut log).unwrap();
    let stored: Vec<(String, &str)> = log
        .events()
        .iter()
        .take_while(|e| e.kind != crate::trace::EventKind::OutputLine)
        .filter(|e| e.kind == crate::trace::EventKind::VarStored)
        .map(|e| (e.subject.to_string(), e.detail.as_str()))
        .collect();
    assert_eq!(
        stored,
        [("x@LAZY#1".into(), "5"), ("y@LAZY#1".into(), "&x*10"), ("z@LAZY#1".into(), "&a+&b")]
    );
}

#[test]
fn open_code_is_collected() {
    let out = run_session("data a; x = 1; run;\n%put done;", &mut NullSink).unwrap();
    assert_eq!(out.open_code, strs(&["data a;", "x = 1;", "run;"]));
    assert_eq!(out.log_lines(), strs(&["done"]));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        /// Resolution has no memo: a reference re-read after its dependency
        /// changes reflects the new value.
        #[test]
        fn no_caching(first in 0i64..1000, second in 0i64..1000, k in 1i64..20) {
            let src = alloc::format!(
                "%macro m(x={first},y=&x*{k});\n%put %eval(&y);\n%let x={second};\n%put %eval(&y);\n%mend;\n%m()"
            );
            let lines = log(&src).unwrap();
            prop_assert_eq!(lines, strs(&[&(first * k).to_string(), &(second * k).to_string()]));
        }

        #[test]
        fn store_as_text(defaults in prop::collection::vec("[a-z0-9+*&]{0,8}", 1..5)) {
            // `&` must start a name; make every reference well-formed
            let defaults: Vec<String> = defaults.into_iter().map(|d| d.replace('&', "&v")).collect();
            let params: Vec<String> = defaults.iter().enumerate().map(|(i, d)| alloc::format!("p{i}={d}")).collect();
            let src = alloc::format!("%macro m({});\n%mend;\n%m()", params.join(","));
            let mut trace = TraceLog::new();
            run_session(&src, &mut trace).unwrap();
            let stored: Vec<String> = trace
                .events()
                .iter()
                .filter(|e| e.kind == crate::trace::EventKind::VarStored)
                .map(|e| e.detail.clone())
                .collect();
            prop_assert_eq!(stored, defaults);
        }
    }
}
