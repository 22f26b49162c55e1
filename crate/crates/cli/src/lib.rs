//! Batch front end for `qillum-core`: run configuration, the experiment
//! subcommands, and CSV and SVG output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
