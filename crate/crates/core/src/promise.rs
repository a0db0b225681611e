//! Promises: an unevaluated expression, the environment to evaluate it in,
//! and a value slot that stays empty until the promise is forced.

use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::env::{EnvError, EnvId, Environments, FrameStatus};
use crate::syntax::Expr;
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PromiseId(u32);

impl PromiseId {
    pub fn from_index(i: usize) -> Self {
        PromiseId(i as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PromiseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "promise#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PromiseState {
    Unforced,
    /// Evaluation in progress; re-entering means the promise depends on itself.
    Forcing,
    Forced(Value),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateTag {
    Unforced,
    Forcing,
    Forced,
}

impl fmt::Display for StateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateTag::Unforced => "UNFORCED",
            StateTag::Forcing => "FORCING",
            StateTag::Forced => "FORCED",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Promise {
    pub id: PromiseId,
    /// Parameter the promise was created for; used in traces only.
    pub name: String,
    pub expr: Rc<Expr>,
    pub env: EnvId,
    pub state: PromiseState,
    pub force_requests: u64,
    pub evaluations: u64,
}

impl Promise {
    pub fn value(&self) -> Option<&Value> {
        match &self.state {
            PromiseState::Forced(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromiseMetrics {
    pub state: StateTag,
    pub force_requests: u64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{id} (`{name}`) depends on itself")]
pub struct CyclicForce {
    pub id: PromiseId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForceError<E> {
    #[error(transparent)]
    Cyclic(CyclicForce),
    #[error(transparent)]
    Eval(E),
}

/// First half of a force: either the cached value or the work to do.
#[derive(Debug, Clone)]
pub enum ForceStep {
    Cached(Value),
    Evaluate { expr: Rc<Expr>, env: EnvId },
}

#[derive(Debug, Clone, Default)]
pub struct PromiseStore {
    promises: Vec<Promise>,
}

impl PromiseStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `expr` without evaluating it or looking anything up.
    pub fn create(
        &mut self,
        name: &str,
        expr: Rc<Expr>,
        env: EnvId,
        envs: &Environments,
    ) -> Result<PromiseId, EnvError> {
        if envs.get(env).status == FrameStatus::Discarded {
            return Err(EnvError::DiscardedEnv(env));
        }
        let id = PromiseId(self.promises.len() as u32);
        self.promises.push(Promise {
            id,
            name: name.into(),
            expr,
            env,
            state: PromiseState::Unforced,
            force_requests: 0,
            evaluations: 0,
        });
        Ok(id)
    }

    pub fn get(&self, id: PromiseId) -> &Promise {
        &self.promises[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Promise> {
        self.promises.iter()
    }

    pub fn len(&self) -> usize {
        self.promises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.promises.is_empty()
    }

    fn cyclic(&self, id: PromiseId) -> CyclicForce {
        CyclicForce {
            id,
            name: self.get(id).name.clone(),
        }
    }

    /// Counts the request and either returns the cached value or marks the
    /// promise as being forced.
    pub fn begin_force(&mut self, id: PromiseId) -> Result<ForceStep, CyclicForce> {
        let p = &mut self.promises[id.index()];
        p.force_requests += 1;
        match &p.state {
            PromiseState::Forced(v) => Ok(ForceStep::Cached(v.clone())),
            PromiseState::Forcing => Err(self.cyclic(id)),
            PromiseState::Unforced => {
                p.state = PromiseState::Forcing;
                Ok(ForceStep::Evaluate {
                    expr: p.expr.clone(),
                    env: p.env,
                })
            }
        }
    }

    /// Caches a successful result. A failed evaluation (`None`) returns the
    /// promise to `Unforced` so the next force retries.
    pub fn finish_force(&mut self, id: PromiseId, result: Option<&Value>) {
        let p = &mut self.promises[id.index()];
        debug_assert_eq!(p.state, PromiseState::Forcing);
        match result {
            Some(v) => {
                p.state = PromiseState::Forced(v.clone());
                p.evaluations += 1;
            }
            None => p.state = PromiseState::Unforced,
        }
    }

    /// Forces `id`, calling `eval` only if no value is cached.
    pub fn force<E>(
        &mut self,
        id: PromiseId,
        eval: impl FnOnce(&Expr, EnvId) -> Result<Value, E>,
    ) -> Result<Value, ForceError<E>> {
        match self.begin_force(id).map_err(ForceError::Cyclic)? {
            ForceStep::Cached(v) => Ok(v),
            ForceStep::Evaluate { expr, env } => {
                let result = eval(&expr, env);
                self.finish_force(id, result.as_ref().ok());
                result.map_err(ForceError::Eval)
            }
        }
    }

    /// Call-by-name access: hands out the expression for a fresh evaluation
    /// and never caches. The promise is marked `Forcing` while the evaluation
    /// runs so self-reference is still detected.
    pub fn begin_reeval(&mut self, id: PromiseId) -> Result<(Rc<Expr>, EnvId), CyclicForce> {
        let p = &mut self.promises[id.index()];
        p.force_requests += 1;
        match p.state {
            PromiseState::Forcing => Err(self.cyclic(id)),
            _ => {
                p.state = PromiseState::Forcing;
                Ok((p.expr.clone(), p.env))
            }
        }
    }

    pub fn finish_reeval(&mut self, id: PromiseId, succeeded: bool) {
        let p = &mut self.promises[id.index()];
        p.state = PromiseState::Unforced;
        if succeeded {
            p.evaluations += 1;
        }
    }

    pub fn metrics(&self, id: PromiseId) -> PromiseMetrics {
        let p = self.get(id);
        let state = match p.state {
            PromiseState::Unforced => StateTag::Unforced,
            PromiseState::Forcing => StateTag::Forcing,
            PromiseState::Forced(_) => StateTag::Forced,
        };
        PromiseMetrics {
            state,
            force_requests: p.force_requests,
            evaluations: p.evaluations,
        }
    }

    /// Number of populated value slots.
    pub fn forced_count(&self) -> usize {
        self.promises.iter().filter(|p| p.value().is_some()).count()
    }
}
