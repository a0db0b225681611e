//! Reference programs bundled with the crate.

/// Functional program whose defaults read the call frame's locals.
pub const FUNC_PROGRAM1: &str = include_str!("../programs/r_prog1.fl");
/// Functional program that rebinds a default's dependency between two reads.
pub const FUNC_PROGRAM2: &str = include_str!("../programs/r_prog2.fl");
/// Macro counterpart of `FUNC_PROGRAM1`.
pub const MACRO_PROGRAM1: &str = include_str!("../programs/sas_prog1.ml");
/// Macro counterpart of `FUNC_PROGRAM2`.
pub const MACRO_PROGRAM2: &str = include_str!("../programs/sas_prog2.ml");
/// Global, closure and execution frames of a single call.
pub const FRAMES: &str = include_str!("../programs/frames.fl");
