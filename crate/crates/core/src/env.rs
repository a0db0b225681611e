//! Environment frames linked to their parents. One registry per run owns
//! every frame; frames are addressed by [`EnvId`] so promises can keep a
//! reference after the call that created the frame has returned.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::promise::PromiseId;
use crate::trace::{EventKind, Subject, TraceSink};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnvId(u32);

impl EnvId {
    pub const GLOBAL: EnvId = EnvId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EnvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "env#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    Val(Value),
    Prom(PromiseId),
    /// A parameter with neither a supplied argument nor a default. Reading it
    /// is an error.
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameStatus {
    Live,
    Discarded,
}

#[derive(Debug, Clone)]
pub struct Environment {
    pub id: EnvId,
    pub parent: Option<EnvId>,
    pub bindings: BTreeMap<String, Binding>,
    pub status: FrameStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error("object `{0}` not found")]
    UnboundName(String),
    #[error("{0} has been discarded")]
    DiscardedEnv(EnvId),
    #[error("the global environment cannot be discarded")]
    CannotDiscardGlobal,
}

/// Per-run frame registry. The global frame is created with the registry.
#[derive(Debug, Clone)]
pub struct Environments {
    frames: Vec<Environment>,
}

impl Default for Environments {
    fn default() -> Self {
        Self::new()
    }
}

impl Environments {
    pub fn new() -> Self {
        Environments {
            frames: alloc::vec![Environment {
                id: EnvId::GLOBAL,
                parent: None,
                bindings: BTreeMap::new(),
                status: FrameStatus::Live,
            }],
        }
    }

    pub fn global(&self) -> EnvId {
        EnvId::GLOBAL
    }

    pub fn get(&self, id: EnvId) -> &Environment {
        &self.frames[id.index()]
    }

    pub fn frames(&self) -> &[Environment] {
        &self.frames
    }

    fn live(&self, id: EnvId) -> Result<&Environment, EnvError> {
        let frame = self.get(id);
        match frame.status {
            FrameStatus::Live => Ok(frame),
            FrameStatus::Discarded => Err(EnvError::DiscardedEnv(id)),
        }
    }

    pub fn child(&mut self, parent: EnvId, sink: &mut dyn TraceSink) -> Result<EnvId, EnvError> {
        self.live(parent)?;
        let id = EnvId(self.frames.len() as u32);
        self.frames.push(Environment {
            id,
            parent: Some(parent),
            bindings: BTreeMap::new(),
            status: FrameStatus::Live,
        });
        sink.emit(EventKind::EnvCreated, Subject::Env(id), alloc::format!("parent={parent}"));
        Ok(id)
    }

    /// Nearest binding for `name` along the parent chain.
    pub fn lookup(&self, env: EnvId, name: &str) -> Result<&Binding, EnvError> {
        let mut cur = Some(env);
        while let Some(id) = cur {
            let frame = self.live(id)?;
            if let Some(b) = frame.bindings.get(name) {
                return Ok(b);
            }
            cur = frame.parent;
        }
        Err(EnvError::UnboundName(name.into()))
    }

    /// Creates or overwrites `name` in exactly this frame.
    pub fn define(&mut self, env: EnvId, name: &str, b: Binding) -> Result<(), EnvError> {
        self.live(env)?;
        self.frames[env.index()].bindings.insert(name.into(), b);
        Ok(())
    }

    pub fn discard(&mut self, env: EnvId, sink: &mut dyn TraceSink) -> Result<(), EnvError> {
        if env == EnvId::GLOBAL {
            return Err(EnvError::CannotDiscardGlobal);
        }
        self.live(env)?;
        self.frames[env.index()].status = FrameStatus::Discarded;
        sink.emit(EventKind::EnvDiscarded, Subject::Env(env), String::new());
        Ok(())
    }

    pub fn depth(&self, env: EnvId) -> usize {
        let mut n = 0;
        let mut cur = self.get(env).parent;
        while let Some(id) = cur {
            n += 1;
            cur = self.get(id).parent;
        }
        n
    }

    /// Non-global frames created so far.
    pub fn created_count(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn discarded_count(&self) -> usize {
        self.frames
            .iter()
            .filter(|f| f.status == FrameStatus::Discarded)
            .count()
    }
}
