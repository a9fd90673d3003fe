//! Command implementations behind the `symext` binary.

pub mod certificate;
pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

pub use error::{exit, CliError, CliResult};
pub use spec::StateSpec;
