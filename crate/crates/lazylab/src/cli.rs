//! `lazylab` subcommands.
//!
//! Exit codes: 0 success, 1 program error (or unexpected pair verdict),
//! 2 usage error, 3 `diff` found a divergence.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use lazylab_core::lab::{
    diff_outputs, generate_mutant, generate_program, paired_run, run_with_metrics, Engine, LabError, LabRun,
    MetricsDelta, Pair, PairSources, RunSummary, Verdict,
};
use lazylab_core::{Pos, Strategy};
use serde_json::json;

use crate::json;

pub const EXIT_OK: u8 = 0;
pub const EXIT_PROGRAM_ERROR: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lazylab", version, about = "Run and compare lazy evaluation strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a program and print its output
    Run(RunArgs),
    /// Run a program and print its trace as JSON lines
    Trace(TraceArgs),
    /// Run a funclang program under two strategies and compare the output
    Diff(DiffArgs),
    /// Compare the bundled funclang and maclang reference programs
    Pairs(PairsArgs),
    /// Print a random funclang program
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Lang {
    Func,
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Strict,
    Need,
    Name,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Strict => Strategy::Strict,
            StrategyArg::Need => Strategy::Need,
            StrategyArg::Name => Strategy::Name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
struct EngineArgs {
    #[arg(long, value_enum)]
    lang: Lang,
    /// Argument-passing strategy (func only; default need)
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, value_enum, default_value = "text")]
    output: Format,
    /// Source file, or `-` for stdin
    input: String,
}

#[derive(Debug, clap::Args)]
struct TraceArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Source file, or `-` for stdin
    input: String,
}

#[derive(Debug, clap::Args)]
struct DiffArgs {
    #[arg(long, value_enum, default_value = "func")]
    lang: Lang,
    /// Give exactly twice
    #[arg(long = "strategy", value_enum)]
    strategies: Vec<StrategyArg>,
    #[arg(long, value_enum, default_value = "text")]
    output: Format,
    /// Source file, or `-` for stdin
    input: String,
}

#[derive(Debug, clap::Args)]
struct PairsArgs {
    #[arg(long, value_enum, default_value = "text")]
    output: Format,
    /// Read r_prog1.fl, r_prog2.fl, sas_prog1.ml and sas_prog2.ml from DIR
    /// instead of the bundled copies
    #[arg(long)]
    dir: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Expression-node budget
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    /// Insert a reassignment between two reads of a default, so that need
    /// and name disagree
    #[arg(long)]
    mutate: bool,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

impl Io<'_> {
    fn error_tag(&self) -> &'static str {
        if self.color {
            "\x1b[1;31merror:\x1b[0m"
        } else {
            "error:"
        }
    }

    fn usage(&mut self, msg: impl Display) -> io::Result<u8> {
        writeln!(self.err, "lazylab: {} {msg}", self.error_tag())?;
        Ok(EXIT_USAGE)
    }

    /// `file:line:col: error: message`
    fn diagnostic(&mut self, file: &str, pos: Option<Pos>, msg: impl Display) -> io::Result<()> {
        let pos = pos.unwrap_or(Pos::new(1, 1));
        writeln!(self.err, "{file}:{pos}: {} {msg}", self.error_tag())
    }

    fn lab_error(&mut self, file: &str, e: &LabError) -> io::Result<()> {
        self.diagnostic(file, e.pos(), e.message())
    }

    fn read_input(&mut self, input: &str) -> Result<(String, String), String> {
        if input == "-" {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(("<stdin>".into(), s))
        } else {
            std::fs::read_to_string(input)
                .map(|s| (input.to_string(), s))
                .map_err(|e| format!("cannot read `{input}`: {e}"))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut io = Io { stdin, out, err, color };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = if color { e.render().ansi().to_string() } else { e.render().to_string() };
            return if e.use_stderr() {
                let _ = write!(io.err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(io.out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&mut io, a),
        Command::Trace(a) => cmd_trace(&mut io, a),
        Command::Diff(a) => cmd_diff(&mut io, a),
        Command::Pairs(a) => cmd_pairs(&mut io, a),
        Command::Gen(a) => cmd_gen(&mut io, a),
    };
    result.unwrap_or(EXIT_PROGRAM_ERROR)
}

fn engine(io: &mut Io<'_>, args: &EngineArgs) -> io::Result<Result<Engine, u8>> {
    Ok(match (args.lang, args.strategy) {
        (Lang::Func, s) => Ok(Engine::Func(s.map_or(Strategy::Need, Strategy::from))),
        (Lang::Macro, None) => Ok(Engine::Macro),
        (Lang::Macro, Some(_)) => Err(io.usage("--strategy only applies to --lang func")?),
    })
}

fn cmd_run(io: &mut Io<'_>, args: RunArgs) -> io::Result<u8> {
    let engine = match engine(io, &args.engine)? {
        Ok(e) => e,
        Err(code) => return Ok(code),
    };
    let (file, source) = match io.read_input(&args.input) {
        Ok(x) => x,
        Err(msg) => return io.usage(msg),
    };
    let result = run_with_metrics(&source, engine);
    let (lines, error) = match &result {
        Ok(run) => (&run.lines, None),
        Err(e) => (&e.lines, Some(e)),
    };
    match args.output {
        Format::Text => {
            for l in lines {
                writeln!(io.out, "{l}")?;
            }
        }
        Format::Json => {
            let v = json!({
                "engine": engine.to_string(),
                "lines": lines,
                "error": error.map(|e| json!({
                    "file": file,
                    "line": e.pos().map(|p| p.line),
                    "col": e.pos().map(|p| p.col),
                    "message": e.message(),
                })),
            });
            writeln!(io.out, "{v}")?;
        }
    }
    match error {
        None => Ok(EXIT_OK),
        Some(e) => {
            io.lab_error(&file, e)?;
            Ok(EXIT_PROGRAM_ERROR)
        }
    }
}

fn cmd_trace(io: &mut Io<'_>, args: TraceArgs) -> io::Result<u8> {
    let engine = match engine(io, &args.engine)? {
        Ok(e) => e,
        Err(code) => return Ok(code),
    };
    let (file, source) = match io.read_input(&args.input) {
        Ok(x) => x,
        Err(msg) => return io.usage(msg),
    };
    let result = run_with_metrics(&source, engine);
    let events = match &result {
        Ok(run) => &run.events,
        Err(e) => &e.events,
    };
    writeln!(io.out, "{}", json::header())?;
    for e in events {
        writeln!(io.out, "{}", json::event(e))?;
    }
    let metrics = lazylab_core::lab::Metrics::from_events(events);
    writeln!(io.out, "{}", json::metrics_record(&metrics))?;
    match &result {
        Ok(_) => Ok(EXIT_OK),
        Err(e) => {
            io.lab_error(&file, e)?;
            Ok(EXIT_PROGRAM_ERROR)
        }
    }
}

fn cmd_diff(io: &mut Io<'_>, args: DiffArgs) -> io::Result<u8> {
    if args.lang != Lang::Func {
        return io.usage("diff compares funclang strategies; use --lang func");
    }
    let [a, b] = args.strategies[..] else {
        return io.usage(format!(
            "diff needs exactly two --strategy options, got {}",
            args.strategies.len()
        ));
    };
    let (a, b) = (Strategy::from(a), Strategy::from(b));
    let (file, source) = match io.read_input(&args.input) {
        Ok(x) => x,
        Err(msg) => return io.usage(msg),
    };
    let mut runs: Vec<LabRun> = Vec::with_capacity(2);
    for s in [a, b] {
        match run_with_metrics(&source, Engine::Func(s)) {
            Ok(run) => runs.push(run),
            Err(e) => {
                io.diagnostic(&file, e.pos(), format_args!("under {s}: {}", e.message()))?;
                return Ok(EXIT_PROGRAM_ERROR);
            }
        }
    }
    let mut report = diff_outputs(&runs[0].lines, &runs[1].lines);
    report.metrics_delta = Some(MetricsDelta {
        left: RunSummary::of(Engine::Func(a), &runs[0].metrics),
        right: RunSummary::of(Engine::Func(b), &runs[1].metrics),
    });
    match args.output {
        Format::Json => {
            let mut v = json::report(&report);
            v["left"] = json!(a.as_str());
            v["right"] = json!(b.as_str());
            writeln!(io.out, "{v}")?;
        }
        Format::Text => match &report.first_diff {
            None => writeln!(io.out, "EQUAL ({} lines)", runs[0].lines.len())?,
            Some(d) => {
                let show = |l: &Option<String>| l.as_ref().map_or("<no line>".to_string(), |s| format!("{s:?}"));
                writeln!(io.out, "DIVERGED at line {}", d.index + 1)?;
                writeln!(io.out, "  {:<6} {}", a.as_str(), show(&d.left))?;
                writeln!(io.out, "  {:<6} {}", b.as_str(), show(&d.right))?;
            }
        },
    }
    Ok(if report.verdict == Verdict::Equal { EXIT_OK } else { EXIT_DIVERGED })
}

const PAIR_FILES: [&str; 4] = ["r_prog1.fl", "r_prog2.fl", "sas_prog1.ml", "sas_prog2.ml"];

fn pair_file(pair: Pair, engine: Engine) -> &'static str {
    match (pair, engine) {
        (Pair::Program1, Engine::Macro) => PAIR_FILES[2],
        (Pair::Program1, _) => PAIR_FILES[0],
        (_, Engine::Macro) => PAIR_FILES[3],
        _ => PAIR_FILES[1],
    }
}

fn load_pair_sources(dir: &Path) -> Result<PairSources, (PathBuf, io::Error)> {
    let read = |name: &str| {
        let path = dir.join(name);
        std::fs::read_to_string(&path).map_err(|e| (path, e))
    };
    Ok(PairSources {
        func1: read(PAIR_FILES[0])?,
        func2: read(PAIR_FILES[1])?,
        macro1: read(PAIR_FILES[2])?,
        macro2: read(PAIR_FILES[3])?,
    })
}

fn cmd_pairs(io: &mut Io<'_>, args: PairsArgs) -> io::Result<u8> {
    let sources = match &args.dir {
        None => PairSources::default(),
        Some(dir) => match load_pair_sources(dir) {
            Ok(s) => s,
            Err((path, e)) => {
                writeln!(io.err, "{}: {} cannot read: {e}", path.display(), io.error_tag())?;
                return Ok(EXIT_PROGRAM_ERROR);
            }
        },
    };
    let mut rows = Vec::new();
    for pair in Pair::ALL {
        match paired_run(pair, &sources) {
            Ok(report) => rows.push((pair, report)),
            Err(e) => {
                let file = match &args.dir {
                    Some(dir) => dir.join(pair_file(pair, e.engine)).display().to_string(),
                    None => format!("<bundled {}>", pair_file(pair, e.engine)),
                };
                io.lab_error(&file, &e.error)?;
                return Ok(EXIT_PROGRAM_ERROR);
            }
        }
    }
    let all_expected = rows.iter().all(|(p, r)| r.verdict == p.expected());
    match args.output {
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(p, r)| {
                    let mut v = json::report(r);
                    v["pair"] = json!(p.as_str());
                    v["expected"] = json!(p.expected().as_str());
                    v
                })
                .collect();
            writeln!(io.out, "{}", serde_json::Value::Array(rows))?;
        }
        Format::Text => {
            writeln!(io.out, "{:<14} {:<9} {:<9} RESULT", "PAIR", "EXPECTED", "VERDICT")?;
            for (p, r) in &rows {
                let mark = if r.verdict == p.expected() { "ok" } else { "UNEXPECTED" };
                write!(io.out, "{:<14} {:<9} {:<9} {mark}", p.as_str(), p.expected().as_str(), r.verdict.as_str())?;
                if let Some(d) = &r.first_diff {
                    let side = |s: &Option<String>| s.clone().unwrap_or_else(|| "<no line>".into());
                    write!(io.out, "  line {}: {} vs {}", d.index + 1, side(&d.left), side(&d.right))?;
                }
                writeln!(io.out)?;
            }
        }
    }
    if all_expected {
        Ok(EXIT_OK)
    } else {
        writeln!(io.err, "lazylab: {} verdicts differ from the expected pattern", io.error_tag())?;
        Ok(EXIT_PROGRAM_ERROR)
    }
}

fn cmd_gen(io: &mut Io<'_>, args: GenArgs) -> io::Result<u8> {
    let size = usize::try_from(args.size).unwrap_or(usize::MAX);
    let src = if args.mutate {
        generate_mutant(args.seed, size)
    } else {
        generate_program(args.seed, size)
    };
    write!(io.out, "{src}")?;
    Ok(EXIT_OK)
}
