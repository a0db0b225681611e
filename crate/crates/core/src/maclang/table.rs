use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Identifies a symbol table in traces: `GLOBAL`, or the macro name and the
/// session-wide invocation ordinal for a local table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableLabel {
    Global,
    Local { macro_name: String, ordinal: u32 },
}

impl TableLabel {
    /// Scope column of `%put _user_` output.
    pub fn scope_name(&self) -> String {
        match self {
            TableLabel::Global => "GLOBAL".to_string(),
            TableLabel::Local { macro_name, .. } => macro_name.to_ascii_uppercase(),
        }
    }
}

impl fmt::Display for TableLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableLabel::Global => f.write_str("GLOBAL"),
            TableLabel::Local { macro_name, ordinal } => {
                write!(f, "{}#{ordinal}", macro_name.to_ascii_uppercase())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableStatus {
    Live,
    Deleted,
}

/// Macro variables of one scope, in insertion order. Values are raw text.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub label: TableLabel,
    pub entries: Vec<(String, String)>,
    pub status: TableStatus,
}

impl SymbolTable {
    pub fn new(label: TableLabel) -> Self {
        SymbolTable {
            label,
            entries: Vec::new(),
            status: TableStatus::Live,
        }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    /// Inserts or overwrites, keeping the original insertion slot.
    pub fn set(&mut self, name: &str, value: String) {
        match self.entries.iter_mut().find(|(n, _)| n == name) {
            Some((_, v)) => *v = value,
            None => self.entries.push((name.into(), value)),
        }
    }

    pub fn text_bytes(&self) -> usize {
        self.entries.iter().map(|(_, v)| v.len()).sum()
    }
}
