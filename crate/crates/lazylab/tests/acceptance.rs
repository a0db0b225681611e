//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;

use lazylab_core::env::Binding;
use lazylab_core::eval::{EvalErrorKind, Interp};
use lazylab_core::lab::{
    diff_outputs, generate_mutant, generate_program, run_with_metrics, Engine, LabErrorKind, LabRun,
    Metrics, Verdict,
};
use lazylab_core::programs::{FRAMES, FUNC_PROGRAM1, FUNC_PROGRAM2, MACRO_PROGRAM1, MACRO_PROGRAM2};
use lazylab_core::{parse, EventKind, Strategy, Subject, TraceEvent, TraceLog, Value};

const SEEDS: u64 = 500;
const SIZE: usize = 24;
const MUTATION_WINDOW: u64 = 50;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(src: &str, engine: Engine) -> Result<LabRun, String> {
    run_with_metrics(src, engine).map_err(|e| format!("{engine}: {e}"))
}

fn func(src: &str, s: Strategy) -> Result<LabRun, String> {
    run(src, Engine::Func(s))
}

fn golden_func_program1() -> Check {
    let r = func(FUNC_PROGRAM1, Strategy::Need)?;
    ensure(r.lines == ["2 20 7"], || format!("printed {:?}", r.lines))?;
    Ok(format!("{:?}", r.lines))
}

fn golden_macro_program1() -> Check {
    let r = run(MACRO_PROGRAM1, Engine::Macro)?;
    ensure(r.lines.iter().any(|l| l == "(2 20 7)"), || format!("log {:?}", r.lines))?;
    Ok(format!("log ends {:?}", r.lines.last().unwrap()))
}

fn golden_func_program2() -> Check {
    let r = func(FUNC_PROGRAM2, Strategy::Need)?;
    ensure(r.lines == ["20", "20"], || format!("printed {:?}", r.lines))?;
    let y = r.metrics.argument("y");
    ensure(y.accesses == 2 && y.evaluations == 1 && y.cache_hits >= 1, || format!("y: {y:?}"))?;
    Ok(format!("{:?}, y accesses {} evaluations {} cache hits {}", r.lines, y.accesses, y.evaluations, y.cache_hits))
}

fn golden_macro_program2() -> Check {
    let r = run(MACRO_PROGRAM2, Engine::Macro)?;
    ensure(r.lines == ["20", "100"], || format!("log {:?}", r.lines))?;
    let y = r.metrics.resolutions_of("y");
    ensure(y == 2, || format!("y resolved {y} times"))?;
    Ok(format!("{:?}, y resolved {y} times", r.lines))
}

fn cross_paradigm() -> Check {
    let name = func(FUNC_PROGRAM2, Strategy::Name)?;
    let mac = run(MACRO_PROGRAM2, Engine::Macro)?;
    ensure(name.lines == ["20", "100"] && name.lines == mac.lines, || {
        format!("name {:?} vs macro {:?}", name.lines, mac.lines)
    })?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = lazylab::cli::run(["lazylab", "pairs", "--output", "json"], &mut std::io::empty(), &mut out, &mut err, false);
    ensure(code == 0, || format!("pairs exited {code}: {}", String::from_utf8_lossy(&err)))?;
    let rows: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let verdicts: Vec<&str> = rows
        .as_array()
        .ok_or("pairs output is not an array")?
        .iter()
        .filter_map(|r| r["verdict"].as_str())
        .collect();
    ensure(verdicts == ["EQUAL", "DIVERGED", "EQUAL"], || format!("verdicts {verdicts:?}"))?;
    Ok(format!("name {:?} = macro; pairs exit 0 with {verdicts:?}", name.lines))
}

fn frames_scenario() -> Check {
    let program = parse(FRAMES).map_err(|e| e.to_string())?;
    let mut log = TraceLog::new();
    let mut interp = Interp::new(Strategy::Need, &mut log);
    interp.run(&program).map_err(|e| e.to_string())?;
    let global = interp.envs().get(interp.global());
    let mut seen = BTreeMap::new();
    for (name, b) in &global.bindings {
        let shown = match b {
            Binding::Val(Value::Num(n)) => format!("{n}"),
            Binding::Val(Value::Closure(_)) => "closure".into(),
            other => format!("{other:?}"),
        };
        seen.insert(name.clone(), shown);
    }
    let expected = BTreeMap::from([("h".to_string(), "closure".to_string()), ("y".into(), "6".into()), ("z".into(), "3".into())]);
    ensure(seen == expected, || format!("global bindings {seen:?}"))?;
    drop(interp);
    let frames: Vec<String> = log
        .events()
        .iter()
        .filter(|e| matches!(e.kind, EventKind::EnvCreated | EventKind::EnvDiscarded))
        .map(|e| format!("{} {}", e.kind, e.subject))
        .collect();
    ensure(frames == ["ENV_CREATED env#1", "ENV_DISCARDED env#1"], || format!("frame events {frames:?}"))?;
    Ok(format!("globals {seen:?}; {frames:?}"))
}

fn laziness() -> Check {
    let src = "f <- function(x, unused = nope * 2) {\n  x + 1\n}\nf(1)\n";
    for s in [Strategy::Need, Strategy::Name] {
        let r = func(src, s)?;
        ensure(r.lines == ["2"], || format!("{s} printed {:?}", r.lines))?;
    }
    match run_with_metrics(src, Engine::Func(Strategy::Strict)) {
        Err(e) if matches!(&e.kind, LabErrorKind::Eval(ev) if ev.kind == EvalErrorKind::UnboundName("nope".into())) => {
            Ok(format!("need and name print [\"2\"]; strict fails: {e}"))
        }
        other => Err(format!("strict gave {other:?}")),
    }
}

struct Corpus {
    runs: Vec<[LabRun; 3]>,
}

fn corpus() -> Result<Corpus, String> {
    let mut runs = Vec::new();
    for seed in 0..SEEDS {
        let src = generate_program(seed, SIZE);
        let r = [Strategy::Strict, Strategy::Need, Strategy::Name].map(|s| func(&src, s));
        let [a, b, c] = r;
        runs.push([a.map_err(|e| format!("seed {seed}: {e}"))?, b?, c?]);
    }
    Ok(Corpus { runs })
}

fn at_most_once(c: &Corpus) -> Check {
    let mut promises = 0;
    for (seed, [_, need, name]) in c.runs.iter().enumerate() {
        let max = need.metrics.max_evaluations_per_promise();
        ensure(max <= 1, || format!("seed {seed}: a promise was evaluated {max} times under need"))?;
        for (arg, n) in need.metrics.arguments() {
            let by_name = name.metrics.argument(&arg).evaluations;
            ensure(n.evaluations <= by_name, || {
                format!("seed {seed}: `{arg}` need {} > name {by_name}", n.evaluations)
            })?;
        }
        promises += need.metrics.promises_created;
    }
    Ok(format!("{SEEDS} programs, {promises} promises, each evaluated at most once; need <= name per argument"))
}

fn reeval_values(events: &[TraceEvent], kind: EventKind, param: &str) -> Vec<String> {
    events
        .iter()
        .filter(|e| e.kind == kind && matches!(&e.subject, Subject::Promise { name, .. } if name == param))
        .map(|e| e.detail.clone())
        .collect()
}

fn agreement(c: &Corpus) -> Check {
    for (seed, [strict, need, name]) in c.runs.iter().enumerate() {
        ensure(need.lines == strict.lines && name.lines == strict.lines, || {
            format!("seed {seed}: strict {:?} need {:?} name {:?}", strict.lines, need.lines, name.lines)
        })?;
    }
    let mut divergent = 0;
    for window in 0..SEEDS / MUTATION_WINDOW {
        let mut found = 0;
        for seed in window * MUTATION_WINDOW..(window + 1) * MUTATION_WINDOW {
            let src = generate_mutant(seed, SIZE);
            let need = func(&src, Strategy::Need)?;
            let name = func(&src, Strategy::Name)?;
            if diff_outputs(&need.lines, &name.lines).verdict == Verdict::Equal {
                continue;
            }
            // the by-name trace shows the mutant parameter re-read with a new
            // value; the by-need trace shows the cached one served again
            let reevals = reeval_values(&name.events, EventKind::NameReeval, "m");
            let hits = reeval_values(&need.events, EventKind::PromiseCacheHit, "m");
            let distinct = reevals.iter().collect::<std::collections::BTreeSet<_>>().len();
            ensure(distinct >= 2 && !hits.is_empty(), || {
                format!("seed {seed}: divergence not explained by re-evaluation: {reevals:?} / {hits:?}\n{src}")
            })?;
            found += 1;
        }
        ensure(found >= 1, || format!("no divergent mutant among seeds of window {window}"))?;
        divergent += found;
    }
    Ok(format!(
        "{SEEDS} programs agree under strict/need/name; {divergent}/{SEEDS} mutants diverge, each traced to by-name re-evaluation"
    ))
}

fn memory_proxy() -> Check {
    let need = func(FUNC_PROGRAM1, Strategy::Need)?;
    let first_read = need
        .events
        .iter()
        .position(|e| matches!(e.kind, EventKind::PromiseForced | EventKind::NameReeval | EventKind::PromiseCacheHit))
        .ok_or("no promise was read")?;
    let created = need.events[..first_read]
        .iter()
        .rposition(|e| e.kind == EventKind::PromiseCreated)
        .ok_or("no promise created before the first read")?;
    let at_call = Metrics::from_events(&need.events[..=created]);
    ensure(at_call.promises_created == 3 && at_call.forced_value_slots == 0, || format!("{at_call:?}"))?;

    let mac = run(MACRO_PROGRAM1, Engine::Macro)?;
    let created = mac
        .events
        .iter()
        .position(|e| e.kind == EventKind::TableCreated)
        .ok_or("no table created")?;
    let body_start = mac.events[created + 1..]
        .iter()
        .position(|e| e.kind != EventKind::VarStored)
        .map_or(mac.events.len(), |i| created + 1 + i);
    let at_invoke = Metrics::from_events(&mac.events[..body_start]);
    ensure(at_invoke.stored_text_bytes > 0, || format!("{at_invoke:?}"))?;
    Ok(format!(
        "after the call's {} promises: forced_value_slots = 0; after parameter storage: stored_text_bytes = {}",
        at_call.promises_created, at_invoke.stored_text_bytes
    ))
}

fn lifecycle(c: &Corpus) -> Check {
    let metrics_of = |src: &str, engine| match run_with_metrics(src, engine) {
        Ok(r) => r.metrics,
        Err(e) => Metrics::from_events(&e.events),
    };
    let mut sessions = 0;
    let extra_macro = [
        "%macro a(x=1);\n%put &x;\n%mend;\n%macro b(y=2);\n%a(x=&y)\n%a()\n%mend;\n%b()\n%b(y=3)",
        "%macro bad(x=1);\n%put &missing;\n%mend;\n%bad()",
    ];
    for src in [MACRO_PROGRAM1, MACRO_PROGRAM2].into_iter().chain(extra_macro) {
        let m = metrics_of(src, Engine::Macro);
        ensure(m.tables_created == m.tables_deleted, || format!("tables {m:?}"))?;
        sessions += 1;
    }
    let mut runs = 0;
    for src in [FUNC_PROGRAM1, FUNC_PROGRAM2, FRAMES] {
        for s in Strategy::ALL {
            let m = metrics_of(src, Engine::Func(s));
            ensure(m.envs_created == m.envs_discarded, || format!("{s}: envs {m:?}"))?;
            runs += 1;
        }
    }
    for group in &c.runs {
        for r in group {
            ensure(r.metrics.envs_created == r.metrics.envs_discarded, || format!("envs {:?}", r.metrics))?;
            runs += 1;
        }
    }
    Ok(format!("{sessions} macro sessions and {runs} funclang runs (including failing ones) release every local scope"))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let with_corpus = |f: fn(&Corpus) -> Check| match &corpus {
        Ok(c) => f(c),
        Err(e) => Err(format!("corpus: {e}")),
    };
    let results: Vec<(u32, &str, Check)> = vec![
        (1, "funclang program 1 by need prints \"2 20 7\"", golden_func_program1()),
        (2, "maclang program 1 logs \"(2 20 7)\"", golden_macro_program1()),
        (3, "funclang program 2 by need prints 20 twice, y evaluated once", golden_func_program2()),
        (4, "maclang program 2 prints 20 then 100, y resolved twice", golden_macro_program2()),
        (5, "by-name funclang matches maclang; pairs pattern", cross_paradigm()),
        (6, "frames of one call and the global bindings after it", frames_scenario()),
        (7, "unused default with an unbound name", laziness()),
        (8, "at-most-once forcing over generated programs", with_corpus(at_most_once)),
        (9, "strategy agreement and mutation divergence", with_corpus(agreement)),
        (10, "unforced promises hold no values; macro parameters hold text", memory_proxy()),
        (11, "local scopes are released", with_corpus(lifecycle)),
    ];
    let mut failed = 0;
    for (n, title, r) in &results {
        match r {
            Ok(evidence) => println!("criterion {n:>2} PASS  {title}: {evidence}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {title}: {why}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
