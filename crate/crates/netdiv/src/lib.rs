//! Command line, configuration and file formats for the `netdiv-core`
//! structural-diversity search.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
