//! File formats and commands behind the `sturm` binary.

pub mod commands;
pub mod error;
pub mod files;

pub use commands::{run, Command};
pub use error::CliError;
