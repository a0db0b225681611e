//! Command-line driver for the lazylab engines. See [`cli::run`].

pub mod cli;
pub mod json;
