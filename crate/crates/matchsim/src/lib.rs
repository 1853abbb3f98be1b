//! File formats, task drivers and command implementations for the
//! `matchsim` command-line tool.

pub mod bench;
pub mod circuit_file;
pub mod commands;
pub mod error;
pub mod parallel;
pub mod tasks;
pub mod training;

pub use circuit_file::CircuitConfig;
pub use error::{exit, CliError, ParseError};
