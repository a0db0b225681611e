//! Random funclang programs.
//!
//! `Agree` programs stay inside a fragment where every strategy prints the
//! same thing: every name is assigned once and before it is read, there is
//! one function, every parameter is read in its body, defaults only use
//! earlier parameters and globals, and there is no division. Values are
//! scalars or two-element vectors, so vector arithmetic never mismatches.
//!
//! `Mutate` programs add a parameter whose default reads a body local, and
//! reassign that local between two reads of the parameter: by-need prints
//! the first value twice, by-name prints both.

use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pos::Pos;
use crate::syntax::{print_program, Arg, BinOp, Expr, FunctionDef, Param, Program, Stmt, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenMode {
    Agree,
    Mutate,
}

/// Name of the function every generated program defines.
pub const FUNCTION_NAME: &str = "f";
/// Parameter added by `Mutate`.
pub const MUTANT_PARAM: &str = "m";
/// Body local the mutant parameter's default reads.
pub const MUTANT_LOCAL: &str = "t";

pub fn generate_program(seed: u64, size: usize) -> String {
    print_program(&generate_ast(seed, size, GenMode::Agree))
}

pub fn generate_mutant(seed: u64, size: usize) -> String {
    print_program(&generate_ast(seed, size, GenMode::Mutate))
}

pub fn generate_ast(seed: u64, size: usize, mode: GenMode) -> Program {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        budget: size.max(1),
    };
    let mut program = g.program();
    if mode == GenMode::Mutate {
        g.mutate(&mut program);
    }
    program
}

fn stmt(kind: StmtKind) -> Stmt {
    Stmt::new(kind, Pos::default())
}

fn assign(name: &str, expr: Expr) -> Stmt {
    stmt(StmtKind::Assign {
        name: name.into(),
        expr,
    })
}

struct Gen {
    rng: ChaCha8Rng,
    /// Expression nodes left to spend.
    budget: usize,
}

impl Gen {
    fn number(&mut self) -> Expr {
        Expr::Number(self.rng.gen_range(0..10) as f64)
    }

    fn leaf(&mut self, vars: &[String]) -> Expr {
        match self.rng.gen_range(0..10) {
            0 => Expr::Vector(vec![self.number(), self.number()]),
            1..=5 if !vars.is_empty() => Expr::ident(vars.choose(&mut self.rng).unwrap().as_str()),
            _ => self.number(),
        }
    }

    /// `*` only takes a small literal on the right so values stay small.
    fn expr(&mut self, vars: &[String], depth: u32) -> Expr {
        if depth == 0 || self.budget == 0 || self.rng.gen_bool(0.35) {
            self.budget = self.budget.saturating_sub(1);
            return self.leaf(vars);
        }
        self.budget -= 1;
        let lhs = self.expr(vars, depth - 1);
        match self.rng.gen_range(0..5) {
            0 => Expr::binary(BinOp::Mul, lhs, Expr::Number(self.rng.gen_range(0..4) as f64)),
            1 | 2 => {
                let rhs = self.expr(vars, depth - 1);
                Expr::binary(BinOp::Sub, lhs, rhs)
            }
            _ => {
                let rhs = self.expr(vars, depth - 1);
                Expr::binary(BinOp::Add, lhs, rhs)
            }
        }
    }

    fn count(&mut self, max: usize) -> usize {
        let cap = (self.budget / 4).min(max);
        self.rng.gen_range(0..=cap)
    }

    fn program(&mut self) -> Program {
        let mut stmts = Vec::new();
        let mut globals: Vec<String> = Vec::new();
        for i in 1..=1 + self.count(3) {
            let name = format!("g{i}");
            stmts.push(assign(&name, self.expr(&globals, 2)));
            globals.push(name);
        }

        let mut params: Vec<Param> = Vec::new();
        let mut scope = globals.clone();
        for i in 1..=1 + self.count(3) {
            let default = self
                .rng
                .gen_bool(0.7)
                .then(|| Rc::new(self.expr(&scope, 2)));
            let name = format!("p{i}");
            params.push(Param { name: name.clone(), default });
            scope.push(name);
        }
        let body = self.body(&scope, &params);
        stmts.push(assign(
            FUNCTION_NAME,
            Expr::Function(Rc::new(FunctionDef { params: params.clone(), body })),
        ));

        let calls = 1 + self.count(2);
        for i in 1..=calls {
            let call = self.call(&globals, &params);
            if i == calls && self.rng.gen_bool(0.5) {
                stmts.push(stmt(StmtKind::Expr(call)));
                break;
            }
            if self.rng.gen_bool(0.5) {
                stmts.push(stmt(StmtKind::Print(call)));
            } else {
                let name = format!("r{i}");
                stmts.push(assign(&name, call));
                let mut visible = globals.clone();
                visible.push(name.clone());
                stmts.push(stmt(StmtKind::Print(Expr::binary(
                    BinOp::Add,
                    Expr::ident(name.as_str()),
                    self.leaf(&visible),
                ))));
            }
        }
        Program { stmts }
    }

    /// Locals and prints over the parameters, ending with an expression that
    /// reads every parameter.
    fn body(&mut self, scope: &[String], params: &[Param]) -> Vec<Stmt> {
        let mut body = Vec::new();
        let mut vars = scope.to_vec();
        for i in 1..=self.count(4) {
            if self.rng.gen_bool(0.5) {
                let name = format!("l{i}");
                body.push(assign(&name, self.expr(&vars, 2)));
                vars.push(name);
            } else {
                body.push(stmt(StmtKind::Print(self.expr(&vars, 2))));
            }
        }
        let mut last = Expr::ident(params[0].name.as_str());
        for p in &params[1..] {
            let op = if self.rng.gen_bool(0.5) { BinOp::Add } else { BinOp::Sub };
            last = Expr::binary(op, last, Expr::ident(p.name.as_str()));
        }
        if self.rng.gen_bool(0.5) {
            last = Expr::binary(BinOp::Add, last, self.leaf(&vars));
        }
        body.push(stmt(StmtKind::Expr(last)));
        body
    }

    /// Parameters without a default are always supplied. A leading run of
    /// supplied parameters may be passed by position, the rest by name in
    /// any order.
    fn call(&mut self, globals: &[String], params: &[Param]) -> Expr {
        let supplied: Vec<bool> = params
            .iter()
            .map(|p| p.default.is_none() || self.rng.gen_bool(0.3))
            .collect();
        let positional = if self.rng.gen_bool(0.5) {
            supplied.iter().take_while(|s| **s).count()
        } else {
            0
        };
        let mut args = Vec::new();
        for _ in 0..positional {
            args.push(Arg {
                name: None,
                expr: Rc::new(self.expr(globals, 1)),
            });
        }
        let mut named: Vec<Arg> = Vec::new();
        for (p, _) in params.iter().zip(&supplied).skip(positional).filter(|(_, s)| **s) {
            named.push(Arg {
                name: Some(p.name.clone()),
                expr: Rc::new(self.expr(globals, 1)),
            });
        }
        named.shuffle(&mut self.rng);
        args.extend(named);
        Expr::Call {
            callee: alloc::boxed::Box::new(Expr::ident(FUNCTION_NAME)),
            args,
        }
    }

    fn mutate(&mut self, program: &mut Program) {
        let def = program
            .stmts
            .iter_mut()
            .find_map(|s| match &mut s.kind {
                StmtKind::Assign { name, expr: Expr::Function(def) } if name == FUNCTION_NAME => Some(def),
                _ => None,
            })
            .expect("generated programs define the function");
        let def = Rc::make_mut(def);
        let k = self.rng.gen_range(1..5) as f64;
        let mut default = Expr::binary(BinOp::Mul, Expr::ident(MUTANT_LOCAL), Expr::Number(k));
        if self.rng.gen_bool(0.5) {
            let p = def.params.choose(&mut self.rng).unwrap().name.clone();
            default = Expr::binary(BinOp::Add, default, Expr::ident(p));
        }
        def.params.push(Param {
            name: MUTANT_PARAM.into(),
            default: Some(Rc::new(default)),
        });
        let first = self.rng.gen_range(0..10) as f64;
        let second = (first + self.rng.gen_range(1..10) as f64) % 10.0;
        // the original final expression stays last
        let tail = def.body.len() - 1;
        let at = self.rng.gen_range(0..=tail);
        let read_gap = self.rng.gen_range(0..=tail - at);
        let inserted = [
            assign(MUTANT_LOCAL, Expr::Number(first)),
            stmt(StmtKind::Print(Expr::ident(MUTANT_PARAM))),
            assign(MUTANT_LOCAL, Expr::Number(second)),
            stmt(StmtKind::Print(Expr::ident(MUTANT_PARAM))),
        ];
        let [set1, read1, set2, read2] = inserted;
        def.body.insert(at, set1);
        def.body.insert(at + 1, read1);
        def.body.insert(at + 2 + read_gap, set2);
        def.body.insert(at + 3 + read_gap, read2);
    }
}
