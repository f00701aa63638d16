//! Front end for `qsc`: the circuit text format, JSON reports, and the
//! `run`, `verify` and `demo` commands.

pub mod commands;
pub mod demo;
pub mod report;
pub mod text;

pub use commands::{CmdError, ExitCode, Outcomes};
pub use text::{parse, serialize, Diagnostic, Program};
