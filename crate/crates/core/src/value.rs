use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::env::EnvId;
use crate::syntax::FunctionDef;

/// Canonical decimal rendering: no trailing zeros, a `.` only when the value
/// is fractional, and no negative zero.
pub fn format_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    alloc::format!("{v}")
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub def: Rc<FunctionDef>,
    pub defined_in: EnvId,
}

impl PartialEq for Closure {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.def, &other.def) && self.defined_in == other.defined_in
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    /// Flat vector of scalars.
    Vec(Vec<f64>),
    Closure(Closure),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Vec(_) => "vector",
            Value::Closure(_) => "function",
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => f.write_str(&format_num(*n)),
            Value::Vec(items) => {
                for (i, n) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    f.write_str(&format_num(*n))?;
                }
                Ok(())
            }
            Value::Closure(c) => {
                f.write_str("<function(")?;
                for (i, p) in c.def.params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(&p.name)?;
                }
                f.write_str(")>")
            }
        }
    }
}
