//! Tree-walking evaluator for funclang with three argument-passing
//! strategies.
//!
//! * `Strict`: arguments and defaults are evaluated when the call is made.
//! * `Need`: arguments become promises, forced at most once.
//! * `Name`: arguments become promises whose expression is re-evaluated on
//!   every read.
//!
//! Supplied arguments capture the caller's environment. Defaults capture the
//! execution environment of the call, so they see assignments the body makes
//! before the parameter is first read.

use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::env::{Binding, EnvError, EnvId, Environments};
use crate::pos::Pos;
use crate::promise::{CyclicForce, ForceStep, PromiseId, PromiseStore};
use crate::syntax::{Arg, BinOp, Expr, Program, Stmt, StmtKind};
use crate::trace::{EventKind, Subject, TraceSink};
use crate::value::{Closure, Value};

/// Nested calls and forces allowed before a run is aborted.
pub const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Strict,
    Need,
    Name,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Strict, Strategy::Need, Strategy::Name];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Strict => "strict",
            Strategy::Need => "need",
            Strategy::Name => "name",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy `{0}` (expected strict, need or name)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownStrategy(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalErrorKind {
    #[error("object `{0}` not found")]
    UnboundName(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("type error: {0}")]
    TypeError(String),
    #[error(transparent)]
    CyclicForce(CyclicForce),
    #[error("{0}")]
    ArityError(String),
    #[error("argument `{0}` is missing, with no default")]
    MissingArg(String),
    #[error("{0} has been discarded")]
    DiscardedEnv(EnvId),
    #[error("the global environment cannot be discarded")]
    CannotDiscardGlobal,
    #[error("arithmetic result is not finite")]
    NonFinite,
    #[error("evaluation nested deeper than {MAX_DEPTH} calls")]
    DepthExceeded,
}

impl From<EnvError> for EvalErrorKind {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::UnboundName(n) => EvalErrorKind::UnboundName(n),
            EnvError::DiscardedEnv(id) => EvalErrorKind::DiscardedEnv(id),
            EnvError::CannotDiscardGlobal => EvalErrorKind::CannotDiscardGlobal,
        }
    }
}

/// A runtime error and the position of the innermost statement that was
/// executing when it happened.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub pos: Option<Pos>,
}

impl EvalError {
    fn at(mut self, pos: Pos) -> Self {
        self.pos.get_or_insert(pos);
        self
    }
}

impl From<EvalErrorKind> for EvalError {
    fn from(kind: EvalErrorKind) -> Self {
        EvalError { kind, pos: None }
    }
}

impl From<EnvError> for EvalError {
    fn from(e: EnvError) -> Self {
        EvalErrorKind::from(e).into()
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl core::error::Error for EvalError {}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    /// Printed lines in execution order, followed by the echo of the final
    /// top-level expression when that expression's value is visible.
    pub lines: Vec<String>,
    /// Value of the final top-level statement, if it is a visible expression.
    pub result: Option<Value>,
}

/// A failed run: the error plus whatever was printed before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct RunError {
    pub error: EvalError,
    pub output: Output,
}

/// One interpreter run: owns the environment registry and promise store.
pub struct Interp<'s> {
    envs: Environments,
    promises: PromiseStore,
    strategy: Strategy,
    sink: &'s mut dyn TraceSink,
    depth: usize,
    last_call_visible: bool,
    lines: Vec<String>,
}

impl<'s> Interp<'s> {
    pub fn new(strategy: Strategy, sink: &'s mut dyn TraceSink) -> Self {
        Interp {
            envs: Environments::new(),
            promises: PromiseStore::new(),
            strategy,
            sink,
            depth: 0,
            last_call_visible: true,
            lines: Vec::new(),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn envs(&self) -> &Environments {
        &self.envs
    }

    pub fn envs_mut(&mut self) -> &mut Environments {
        &mut self.envs
    }

    pub fn promises(&self) -> &PromiseStore {
        &self.promises
    }

    pub fn global(&self) -> EnvId {
        self.envs.global()
    }

    /// Runs `program` in the global environment.
    pub fn run(&mut self, program: &Program) -> Result<Output, RunError> {
        let global = self.global();
        let mut result = None;
        for (i, stmt) in program.stmts.iter().enumerate() {
            match self.exec_stmt(stmt, global) {
                Ok((value, visible)) => {
                    let last = i + 1 == program.stmts.len();
                    if last && visible && matches!(stmt.kind, StmtKind::Expr(_)) {
                        self.output_line(value.to_string());
                        result = Some(value);
                    }
                }
                Err(error) => {
                    return Err(RunError {
                        error,
                        output: Output {
                            lines: core::mem::take(&mut self.lines),
                            result: None,
                        },
                    })
                }
            }
        }
        Ok(Output {
            lines: core::mem::take(&mut self.lines),
            result,
        })
    }

    fn output_line(&mut self, line: String) {
        self.sink.emit(EventKind::OutputLine, Subject::Output, line.clone());
        self.lines.push(line);
    }

    /// Executes one statement, returning its value and whether that value is
    /// visible (assignments and prints are not).
    fn exec_stmt(&mut self, stmt: &Stmt, env: EnvId) -> Result<(Value, bool), EvalError> {
        let r = match &stmt.kind {
            StmtKind::Assign { name, expr } => self.eval_expr(expr, env).and_then(|v| {
                self.envs.define(env, name, Binding::Val(v.clone()))?;
                self.sink.emit(
                    EventKind::VarStored,
                    Subject::Binding {
                        env,
                        name: name.clone(),
                    },
                    v.to_string(),
                );
                Ok((v, false))
            }),
            StmtKind::Expr(e) => self.eval_expr(e, env).map(|v| {
                let visible = !matches!(e, Expr::Call { .. }) || self.last_call_visible;
                (v, visible)
            }),
            StmtKind::Print(e) => self.eval_expr(e, env).map(|v| {
                self.output_line(v.to_string());
                (v, false)
            }),
        };
        r.map_err(|e| e.at(stmt.pos))
    }

    pub fn eval_expr(&mut self, e: &Expr, env: EnvId) -> Result<Value, EvalError> {
        match e {
            Expr::Number(n) => Ok(Value::Num(*n)),
            Expr::Ident(name) => self.read_var(name, env),
            Expr::Binary { op, lhs, rhs } => {
                let l = self.eval_expr(lhs, env)?;
                let r = self.eval_expr(rhs, env)?;
                Ok(arith(*op, &l, &r)?)
            }
            Expr::Vector(elems) => {
                let mut out = Vec::with_capacity(elems.len());
                for el in elems {
                    match self.eval_expr(el, env)? {
                        Value::Num(n) => out.push(n),
                        Value::Vec(v) => out.extend(v),
                        Value::Closure(_) => {
                            return Err(EvalErrorKind::TypeError("cannot put a function in a vector".into()).into())
                        }
                    }
                }
                Ok(Value::Vec(out))
            }
            Expr::Call { callee, args } => {
                let f = self.eval_expr(callee, env)?;
                self.call_function(&f, args, env)
            }
            Expr::Function(def) => Ok(Value::Closure(Closure {
                def: def.clone(),
                defined_in: env,
            })),
        }
    }

    fn read_var(&mut self, name: &str, env: EnvId) -> Result<Value, EvalError> {
        match self.envs.lookup(env, name)? {
            Binding::Val(v) => Ok(v.clone()),
            Binding::Missing => Err(EvalErrorKind::MissingArg(name.into()).into()),
            &Binding::Prom(p) => match self.strategy {
                Strategy::Name => self.reeval(p),
                Strategy::Need | Strategy::Strict => self.force(p),
            },
        }
    }

    fn enter(&mut self) -> Result<(), EvalError> {
        if self.depth >= MAX_DEPTH {
            return Err(EvalErrorKind::DepthExceeded.into());
        }
        self.depth += 1;
        Ok(())
    }

    fn promise_subject(&self, p: PromiseId) -> Subject {
        Subject::Promise {
            id: p,
            name: self.promises.get(p).name.clone(),
        }
    }

    /// Call-by-need read: evaluate once, then serve the cached value.
    fn force(&mut self, p: PromiseId) -> Result<Value, EvalError> {
        let step = self
            .promises
            .begin_force(p)
            .map_err(EvalErrorKind::CyclicForce)?;
        match step {
            ForceStep::Cached(v) => {
                self.sink
                    .emit(EventKind::PromiseCacheHit, self.promise_subject(p), alloc::format!("value={v}"));
                Ok(v)
            }
            ForceStep::Evaluate { expr, env } => {
                let r = self.enter().and_then(|()| {
                    let r = self.eval_expr(&expr, env);
                    self.depth -= 1;
                    r
                });
                self.promises.finish_force(p, r.as_ref().ok());
                if let Ok(v) = &r {
                    self.sink
                        .emit(EventKind::PromiseForced, self.promise_subject(p), alloc::format!("value={v}"));
                }
                r
            }
        }
    }

    /// Call-by-name read: evaluate the argument expression afresh.
    fn reeval(&mut self, p: PromiseId) -> Result<Value, EvalError> {
        let (expr, env) = self
            .promises
            .begin_reeval(p)
            .map_err(EvalErrorKind::CyclicForce)?;
        let r = self.enter().and_then(|()| {
            let r = self.eval_expr(&expr, env);
            self.depth -= 1;
            r
        });
        self.promises.finish_reeval(p, r.is_ok());
        if let Ok(v) = &r {
            self.sink
                .emit(EventKind::NameReeval, self.promise_subject(p), alloc::format!("value={v}"));
        }
        r
    }

    fn new_promise(&mut self, name: &str, expr: &Rc<Expr>, env: EnvId) -> Result<PromiseId, EvalError> {
        let id = self.promises.create(name, expr.clone(), env, &self.envs)?;
        self.sink.emit(
            EventKind::PromiseCreated,
            Subject::Promise {
                id,
                name: name.into(),
            },
            alloc::format!("expr={expr} env={env}"),
        );
        Ok(id)
    }

    /// Applies a closure: binds parameters in a fresh execution environment,
    /// runs the body, and discards the environment on the way out.
    pub fn call_function(&mut self, f: &Value, args: &[Arg], caller_env: EnvId) -> Result<Value, EvalError> {
        let Value::Closure(closure) = f else {
            return Err(EvalErrorKind::TypeError(alloc::format!("attempt to call a {}", f.type_name())).into());
        };
        let def = closure.def.clone();
        let slots = match_args(&def.params, args)?;
        self.enter()?;
        let exec = match self.envs.child(closure.defined_in, self.sink) {
            Ok(id) => id,
            Err(e) => {
                self.depth -= 1;
                return Err(e.into());
            }
        };
        let result = self.bind_and_run(&def.params, &def.body, &slots, args, caller_env, exec);
        self.depth -= 1;
        self.envs.discard(exec, self.sink)?;
        let (value, visible) = result?;
        self.last_call_visible = visible;
        Ok(value)
    }

    fn bind_and_run(
        &mut self,
        params: &[crate::syntax::Param],
        body: &[Stmt],
        slots: &[Option<usize>],
        args: &[Arg],
        caller_env: EnvId,
        exec: EnvId,
    ) -> Result<(Value, bool), EvalError> {
        match self.strategy {
            Strategy::Strict => {
                let mut supplied = Vec::with_capacity(args.len());
                for a in args {
                    supplied.push(self.eval_expr(&a.expr, caller_env)?);
                }
                for (param, slot) in params.iter().zip(slots) {
                    let binding = match (slot, &param.default) {
                        (Some(i), _) => Binding::Val(supplied[*i].clone()),
                        (None, Some(d)) => Binding::Val(self.eval_expr(d, exec)?),
                        (None, None) => Binding::Missing,
                    };
                    self.envs.define(exec, &param.name, binding)?;
                }
            }
            Strategy::Need | Strategy::Name => {
                for (param, slot) in params.iter().zip(slots) {
                    let binding = match (slot, &param.default) {
                        (Some(i), _) => Binding::Prom(self.new_promise(&param.name, &args[*i].expr, caller_env)?),
                        (None, Some(d)) => Binding::Prom(self.new_promise(&param.name, d, exec)?),
                        (None, None) => Binding::Missing,
                    };
                    self.envs.define(exec, &param.name, binding)?;
                }
            }
        }
        let mut last = (Value::Vec(Vec::new()), false);
        for stmt in body {
            last = self.exec_stmt(stmt, exec)?;
        }
        Ok(last)
    }
}

/// For each parameter, the index of the argument that fills it: exact-name
/// matches first, then positional arguments left to right.
fn match_args(params: &[crate::syntax::Param], args: &[Arg]) -> Result<Vec<Option<usize>>, EvalError> {
    let mut slots = vec![None; params.len()];
    for (i, a) in args.iter().enumerate() {
        let Some(name) = &a.name else { continue };
        let Some(pi) = params.iter().position(|p| &p.name == name) else {
            return Err(EvalErrorKind::ArityError(alloc::format!("unused argument ({name} = {})", a.expr)).into());
        };
        slots[pi] = Some(i);
    }
    let mut free = 0;
    for (i, a) in args.iter().enumerate() {
        if a.name.is_some() {
            continue;
        }
        while free < slots.len() && slots[free].is_some() {
            free += 1;
        }
        if free == slots.len() {
            return Err(EvalErrorKind::ArityError(alloc::format!("unused argument ({})", a.expr)).into());
        }
        slots[free] = Some(i);
    }
    Ok(slots)
}

fn apply(op: BinOp, a: f64, b: f64) -> Result<f64, EvalErrorKind> {
    let r = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return Err(EvalErrorKind::DivisionByZero);
            }
            a / b
        }
    };
    if r.is_finite() {
        Ok(r)
    } else {
        Err(EvalErrorKind::NonFinite)
    }
}

/// Scalar arithmetic, extended element-wise to vectors. A length-1 operand is
/// broadcast; other length mismatches are type errors.
fn arith(op: BinOp, l: &Value, r: &Value) -> Result<Value, EvalErrorKind> {
    let as_slice = |v: &Value| -> Result<Vec<f64>, EvalErrorKind> {
        match v {
            Value::Num(n) => Ok(vec![*n]),
            Value::Vec(items) => Ok(items.clone()),
            Value::Closure(_) => Err(EvalErrorKind::TypeError(alloc::format!(
                "non-numeric argument to binary operator `{}`",
                op.symbol()
            ))),
        }
    };
    if let (Value::Num(a), Value::Num(b)) = (l, r) {
        return apply(op, *a, *b).map(Value::Num);
    }
    let (a, b) = (as_slice(l)?, as_slice(r)?);
    let n = match (a.len(), b.len()) {
        (x, y) if x == y => x,
        (1, y) => y,
        (x, 1) => x,
        (x, y) => {
            return Err(EvalErrorKind::TypeError(alloc::format!("vector lengths differ ({x} vs {y})")));
        }
    };
    let pick = |v: &[f64], i: usize| if v.len() == 1 { v[0] } else { v[i] };
    (0..n)
        .map(|i| apply(op, pick(&a, i), pick(&b, i)))
        .collect::<Result<Vec<_>, _>>()
        .map(Value::Vec)
}

/// Runs a parsed program under `strategy`, reporting to `sink`.
pub fn run_program(program: &Program, strategy: Strategy, sink: &mut dyn TraceSink) -> Result<Output, RunError> {
    Interp::new(strategy, sink).run(program)
}
