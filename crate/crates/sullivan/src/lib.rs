//! Text format, example corpus and command-line driver for `sullivan-core`.

pub mod cli;
pub mod corpus;
pub mod dsl;
pub mod error;
pub mod model;

pub use error::{CliError, CliResult};
